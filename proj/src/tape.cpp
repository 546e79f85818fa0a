#include "brdffield/tape.hpp"

namespace brdffield {

thread_local Tape* Tape::active_ = nullptr;

}  // namespace brdffield
