#include "brdffield/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "brdffield/errors.hpp"
#include "brdffield/metrics.hpp"
#include "brdffield/quadrature.hpp"
#include "brdffield/render.hpp"

namespace brdffield {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_csv(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw ConfigError("bad number '" + item + "'");
  }
  return out;
}

Rgb rgb_from_csv(const std::vector<double>& v) {
  if (v.size() == 1) return Rgb::Constant(v[0]);
  if (v.size() == 3) return Rgb(v[0], v[1], v[2]);
  throw ConfigError("expected 1 or 3 comma-separated values");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

std::string default_out_dir() {
  const char* env = std::getenv("BRDFFIELD_OUT");
  return env && *env ? env : ".";
}

json metrics_to_json(const ImageMetrics& m) {
  return json{{"mae", m.mae},
              {"mse", m.mse},
              {"psnr", m.psnr},
              {"ssim", m.ssim},
              {"delta_e", m.delta_e}};
}

}  // namespace

BrdfSource parse_source(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  if (colon != std::string::npos) {
    const std::string kind = descriptor.substr(0, colon);
    const auto args = parse_csv(descriptor.substr(colon + 1));
    if (kind == "lambertian") {
      Lambertian l;
      l.albedo = rgb_from_csv(args);
      return AnalyticBrdf{l};
    }
    if (kind == "constant") {
      ScaledConstant c;
      c.value = rgb_from_csv(args);
      return AnalyticBrdf{c};
    }
    if (kind == "ggx") {
      if (args.empty()) throw ConfigError("ggx needs at least alpha");
      GgxMicrofacet g;
      g.roughness = args[0];
      if (g.roughness <= 0.0 || g.roughness > 1.0)
        throw ConfigError("ggx alpha must be in (0, 1]");
      if (args.size() >= 4) g.f0 = Rgb(args[1], args[2], args[3]);
      if (args.size() >= 7) g.diffuse = Rgb(args[4], args[5], args[6]);
      if (args.size() != 1 && args.size() != 4 && args.size() != 7)
        throw ConfigError("ggx takes 1, 4 or 7 values");
      return AnalyticBrdf{g};
    }
    throw ConfigError("unknown analytic source kind '" + kind + "'");
  }
  if (descriptor.ends_with(".bfck")) return load_checkpoint(descriptor);
  return load_merl_file(descriptor);
}

TrainConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  TrainConfig cfg;
  const auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        field = j.at(key).get<std::decay_t<decltype(field)>>();
      } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key +
                          "' has the wrong type");
      }
      j.erase(key);
    }
  };
  std::string mode = "antiderivative", activation = "softplus";
  take("mode", mode);
  take("activation", activation);
  take("reciprocity", cfg.reciprocity);
  take("use_epl", cfg.use_epl);
  take("use_ce", cfg.use_ce);
  take("lambda_epl", cfg.lambda_epl);
  take("lambda_ce", cfg.lambda_ce);
  take("learning_rate", cfg.learning_rate);
  take("batch_size", cfg.batch_size);
  take("epochs", cfg.epochs);
  take("epl_wi_samples_per_step", cfg.epl_wi_samples_per_step);
  take("n_samples", cfg.n_samples);
  take("seed", cfg.seed);
  take("hidden", cfg.hidden);
  take("per_channel_epl", cfg.per_channel_epl);
  if (!j.empty())
    throw ConfigError("unknown config key '" + j.begin().key() + "'");
  if (mode == "antiderivative")
    cfg.mode = FieldMode::kAntiderivative;
  else if (mode == "direct")
    cfg.mode = FieldMode::kDirect;
  else
    throw ConfigError("mode must be 'antiderivative' or 'direct'");
  cfg.activation = activation_from_string(activation);
  if (cfg.lambda_epl < 0.0 || cfg.lambda_ce < 0.0)
    throw ConfigError("loss weights must be non-negative");
  if (cfg.batch_size < 1 || cfg.epochs < 1 || cfg.n_samples < 1 ||
      cfg.epl_wi_samples_per_step < 1)
    throw ConfigError("counts must be positive");
  return cfg;
}

std::string config_to_json_text(const TrainConfig& cfg) {
  json j{{"mode", to_string(cfg.mode)},
         {"activation", to_string(cfg.activation)},
         {"reciprocity", cfg.reciprocity},
         {"use_epl", cfg.use_epl},
         {"use_ce", cfg.use_ce},
         {"lambda_epl", cfg.lambda_epl},
         {"lambda_ce", cfg.lambda_ce},
         {"learning_rate", cfg.learning_rate},
         {"batch_size", cfg.batch_size},
         {"epochs", cfg.epochs},
         {"epl_wi_samples_per_step", cfg.epl_wi_samples_per_step},
         {"n_samples", cfg.n_samples},
         {"seed", cfg.seed},
         {"hidden", cfg.hidden},
         {"per_channel_epl", cfg.per_channel_epl}};
  return j.dump(2) + "\n";
}

namespace {

struct FitOptions {
  std::string source;
  std::string config_path;
  std::string out = default_out_dir();
  bool no_reciprocity = false;
  bool no_epl = false;
  bool no_ce = false;
  std::int64_t seed_override = -1;
};

int cmd_fit(const FitOptions& opt) {
  std::string echo;
  TrainConfig cfg;
  if (!opt.config_path.empty()) {
    echo = read_text_file(opt.config_path);
    cfg = config_from_json_text(echo);
  } else {
    cfg = TrainConfig{};
  }
  if (opt.no_reciprocity) cfg.reciprocity = false;
  if (opt.no_epl) {
    // Dropping the energy technique means dropping the antiderivative
    // formulation with it (the direct baseline).
    cfg.use_epl = false;
    cfg.mode = FieldMode::kDirect;
  }
  if (opt.no_ce) cfg.use_ce = false;
  if (opt.seed_override >= 0)
    cfg.seed = static_cast<std::uint64_t>(opt.seed_override);
  if (echo.empty()) echo = config_to_json_text(cfg);

  const BrdfSource src = parse_source(opt.source);
  fs::create_directories(opt.out);
  auto [model, report] = train(src, cfg, opt.out);
  report.config_echo = echo;

  write_text_file((fs::path(opt.out) / "config_echo.json").string(), echo);

  std::ostringstream csv;
  csv << "epoch,total,fit,epl,ce\n";
  csv.precision(17);
  for (std::size_t e = 0; e < report.curve.size(); ++e) {
    const auto& c = report.curve[e];
    csv << e << ',' << c.total << ',' << c.fit << ',' << c.epl << ','
        << c.ce << '\n';
  }
  write_text_file((fs::path(opt.out) / "loss_curve.csv").string(), csv.str());

  json jcurve = json::array();
  for (std::size_t e = 0; e < report.curve.size(); ++e) {
    const auto& c = report.curve[e];
    jcurve.push_back(json{{"epoch", e},
                          {"total", c.total},
                          {"fit", c.fit},
                          {"epl", c.epl},
                          {"ce", c.ce}});
  }
  json jreport{
      {"config", json::parse(config_to_json_text(cfg))},
      {"config_echo", echo},
      {"curve", jcurve},
      {"final",
       json{{"fit", report.final_fit},
            {"best_epoch", report.best_epoch},
            {"best_total", report.best_total},
            {"hri", report.hri},
            {"hci", report.hci},
            {"epi", report.epi}}},
      {"checkpoints", json{{"final", report.checkpoint_final},
                           {"best", report.checkpoint_best}}}};
  write_text_file((fs::path(opt.out) / "report.json").string(),
                  jreport.dump(2) + "\n");
  // Wall clock lives outside report.json so reruns stay byte-identical.
  write_text_file((fs::path(opt.out) / "timing.txt").string(),
                  std::to_string(report.wall_seconds) + " s\n");
  std::cout << "fit: final loss " << report.final_fit
            << ", checkpoints in " << opt.out << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& source, const std::vector<double>& io_angles,
             const std::vector<double>& rusink) {
  const BrdfSource src = parse_source(source);
  DirectionPair p;
  if (!rusink.empty()) {
    if (rusink.size() != 4)
      throw ConfigError("--rusink needs theta_h,phi_h,theta_d,phi_d");
    const auto pair =
        rusink_to_io({rusink[0], rusink[1], rusink[2], rusink[3]});
    if (!pair) throw DataError("rusink coordinates are below the horizon");
    p = *pair;
  } else {
    if (io_angles.size() != 4)
      throw ConfigError("--angles needs theta_i,phi_i,theta_o,phi_o");
    p = {{io_angles[0], io_angles[1]}, {io_angles[2], io_angles[3]}};
  }
  const auto v = source_eval(src, p);
  json out;
  if (v)
    out = json{{"valid", true}, {"rgb", {(*v)[0], (*v)[1], (*v)[2]}}};
  else
    out = json{{"valid", false}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

void write_invocation(const std::string& out_dir, const json& j) {
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "invocation.json").string(),
                  j.dump(2) + "\n");
}

int cmd_render(const std::string& source, const std::string& out_dir,
               int res, double light_theta, double light_phi,
               const std::vector<double>& radiance, bool ppm) {
  const BrdfSource src = parse_source(source);
  Scene scene;
  scene.width = scene.height = res;
  PointLight light;
  light.direction = {light_theta, light_phi};
  if (!radiance.empty()) light.radiance = rgb_from_csv(radiance);
  scene.light = light;
  const Image img = render_direct(src, scene);
  write_invocation(out_dir,
                   json{{"command", "render"},
                        {"source", source},
                        {"resolution", res},
                        {"light_theta", light_theta},
                        {"light_phi", light_phi}});
  save_pfm(img, (fs::path(out_dir) / "render.pfm").string());
  if (ppm) save_ppm(img, (fs::path(out_dir) / "render.ppm").string());
  std::cout << "render: wrote " << (fs::path(out_dir) / "render.pfm").string()
            << "\n";
  return kExitOk;
}

int cmd_furnace(const std::string& source, const std::string& out_dir,
                int res, int order, bool ppm) {
  const BrdfSource src = parse_source(source);
  Scene scene;
  scene.width = scene.height = res;
  scene.light = Furnace{};
  const Image img = render_furnace(src, scene, order);
  const Image excess = furnace_excess(img);
  write_invocation(out_dir, json{{"command", "furnace"},
                                 {"source", source},
                                 {"resolution", res},
                                 {"quad_order", order}});
  save_pfm(img, (fs::path(out_dir) / "furnace.pfm").string());
  save_pfm(excess, (fs::path(out_dir) / "furnace_excess.pfm").string());
  if (ppm) save_ppm(img, (fs::path(out_dir) / "furnace.ppm").string());
  const json out{{"eci", eci(img)}};
  write_text_file((fs::path(out_dir) / "furnace.json").string(),
                  out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_metrics(const std::string& source, const std::string& out_dir, int n,
                int wi_count, int order, std::uint64_t seed, int eci_res) {
  const BrdfSource src = parse_source(source);
  const BrdfEvaluator ev = make_evaluator(src);
  json out;
  out["hri"] = hri(ev, n, seed);
  out["hci"] = hci(ev, n, seed + 1);
  out["epi"] = epi(src, wi_count, order, seed + 2);
  Scene scene;
  scene.width = scene.height = eci_res;
  scene.light = Furnace{};
  out["eci"] = eci(render_furnace(src, scene, order));
  json scaled;
  for (const char* k : {"hri", "hci", "epi", "eci"})
    scaled[k] = scaled_for_table(out[k].get<double>());
  out["table_scaled_1e3"] = scaled;
  write_invocation(out_dir, json{{"command", "metrics"},
                                 {"source", source},
                                 {"n", n},
                                 {"wi_count", wi_count},
                                 {"quad_order", order},
                                 {"seed", seed}});
  write_text_file((fs::path(out_dir) / "metrics.json").string(),
                  out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_gen_fixture(const std::string& kind_params, const std::string& out,
                    const std::string& furnace_out, int furnace_res,
                    int order) {
  const BrdfSource src = parse_source(kind_params);
  const auto* a = std::get_if<AnalyticBrdf>(&src);
  if (!a) throw ConfigError("gen-fixture takes an analytic descriptor");
  save_merl_file(rasterize_to_merl(*a), out);
  std::cout << "gen-fixture: wrote " << out << "\n";
  if (!furnace_out.empty()) {
    Scene scene;
    scene.width = scene.height = furnace_res;
    scene.light = Furnace{};
    save_pfm(render_furnace(src, scene, order), furnace_out);
    std::cout << "gen-fixture: wrote " << furnace_out << "\n";
  }
  return kExitOk;
}

int cmd_compare(const std::string& src_a, const std::string& src_b,
                const std::string& out_dir, int res_a, int res_b,
                double light_theta, double light_phi, int order, int n,
                std::uint64_t seed) {
  if (res_a != res_b)
    throw ConfigError("compare: resolutions must match (" +
                      std::to_string(res_a) + " vs " + std::to_string(res_b) +
                      ")");
  const BrdfSource a = parse_source(src_a);
  const BrdfSource b = parse_source(src_b);
  Scene scene;
  scene.width = scene.height = res_a;
  PointLight light;
  light.direction = {light_theta, light_phi};
  scene.light = light;

  const Image ra = render_direct(a, scene);
  const Image rb = render_direct(b, scene);
  Scene furnace_scene = scene;
  furnace_scene.light = Furnace{};
  const Image fa = render_furnace(a, furnace_scene, order);
  const Image fb = render_furnace(b, furnace_scene, order);

  fs::create_directories(out_dir);
  save_pfm(ra, (fs::path(out_dir) / "a_render.pfm").string());
  save_pfm(rb, (fs::path(out_dir) / "b_render.pfm").string());
  save_pfm(fa, (fs::path(out_dir) / "a_furnace.pfm").string());
  save_pfm(fb, (fs::path(out_dir) / "b_furnace.pfm").string());
  Image diff = ra;
  for (std::size_t i = 0; i < diff.pixels.size(); ++i)
    diff.pixels[i] = (ra.pixels[i] - rb.pixels[i]).abs();
  save_pfm(diff, (fs::path(out_dir) / "render_abs_diff.pfm").string());

  const auto physics = [&](const BrdfSource& s, const Image& furnace) {
    const BrdfEvaluator ev = make_evaluator(s);
    return json{{"hri", hri(ev, n, seed)},
                {"hci", hci(ev, n, seed + 1)},
                {"epi", epi(s, 32, order, seed + 2)},
                {"eci", eci(furnace)}};
  };
  json out{{"a", physics(a, fa)},
           {"b", physics(b, fb)},
           {"render_image_metrics", metrics_to_json(image_metrics(ra, rb))},
           {"furnace_image_metrics", metrics_to_json(image_metrics(fa, fb))}};
  write_invocation(out_dir, json{{"command", "compare"},
                                 {"a", src_a},
                                 {"b", src_b},
                                 {"resolution", res_a},
                                 {"seed", seed}});
  write_text_file((fs::path(out_dir) / "compare.json").string(),
                  out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Neural BRDF fitting and physical-plausibility toolkit"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model to a BRDF source");
  fit_cmd->add_option("--source", fit_opt.source, "source descriptor")
      ->required();
  fit_cmd->add_option("--config", fit_opt.config_path, "config JSON path");
  fit_cmd->add_option("--out", fit_opt.out, "output directory");
  fit_cmd->add_option("--seed", fit_opt.seed_override, "seed override");
  fit_cmd->add_flag("--no-reciprocity", fit_opt.no_reciprocity,
                    "plain phi_d embedding (baseline behaviour)");
  fit_cmd->add_flag("--no-epl", fit_opt.no_epl,
                    "drop the energy technique (direct model, no penalty)");
  fit_cmd->add_flag("--no-ce", fit_opt.no_ce, "drop the chromaticity term");

  std::string eval_source;
  std::vector<double> eval_angles, eval_rusink;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a source once");
  eval_cmd->add_option("--source", eval_source)->required();
  eval_cmd->add_option("--angles", eval_angles,
                       "theta_i,phi_i,theta_o,phi_o (radians)")
      ->delimiter(',');
  eval_cmd->add_option("--rusink", eval_rusink,
                       "theta_h,phi_h,theta_d,phi_d (radians)")
      ->delimiter(',');

  std::string render_source, render_out = default_out_dir();
  int render_res = 256;
  double light_theta = 0.4, light_phi = 0.0;
  std::vector<double> render_radiance;
  bool render_ppm = false;
  auto* render_cmd = app.add_subcommand("render", "direct-light sphere render");
  render_cmd->add_option("--source", render_source)->required();
  render_cmd->add_option("--out", render_out);
  render_cmd->add_option("--res", render_res);
  render_cmd->add_option("--light-theta", light_theta);
  render_cmd->add_option("--light-phi", light_phi);
  render_cmd->add_option("--light-rgb", render_radiance)->delimiter(',');
  render_cmd->add_flag("--ppm", render_ppm, "also write an 8-bit preview");

  std::string furnace_source, furnace_out = default_out_dir();
  int furnace_res = 128, furnace_order = 64;
  bool furnace_ppm = false;
  auto* furnace_cmd =
      app.add_subcommand("furnace", "white furnace test render");
  furnace_cmd->add_option("--source", furnace_source)->required();
  furnace_cmd->add_option("--out", furnace_out);
  furnace_cmd->add_option("--res", furnace_res);
  furnace_cmd->add_option("--order", furnace_order);
  furnace_cmd->add_flag("--ppm", furnace_ppm);

  std::string metrics_source, metrics_out = default_out_dir();
  int metrics_n = 4096, metrics_wi = 64, metrics_order = 32, metrics_eci_res = 96;
  std::uint64_t metrics_seed = 7;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "physical plausibility metrics");
  metrics_cmd->add_option("--source", metrics_source)->required();
  metrics_cmd->add_option("--out", metrics_out);
  metrics_cmd->add_option("--n", metrics_n);
  metrics_cmd->add_option("--wi-count", metrics_wi);
  metrics_cmd->add_option("--order", metrics_order);
  metrics_cmd->add_option("--seed", metrics_seed);
  metrics_cmd->add_option("--eci-res", metrics_eci_res);

  std::string gf_kind, gf_out, gf_furnace;
  int gf_res = 96, gf_order = 32;
  auto* gf_cmd = app.add_subcommand(
      "gen-fixture", "rasterize an analytic oracle to a measured-format file");
  gf_cmd->add_option("--kind", gf_kind, "analytic descriptor")->required();
  gf_cmd->add_option("--out", gf_out, "output binary path")->required();
  gf_cmd->add_option("--furnace", gf_furnace, "optional reference furnace PFM");
  gf_cmd->add_option("--furnace-res", gf_res);
  gf_cmd->add_option("--order", gf_order);

  std::string cmp_a, cmp_b, cmp_out = default_out_dir();
  int cmp_res_a = 128, cmp_res_b = 128, cmp_order = 32, cmp_n = 4096;
  double cmp_light_theta = 0.4, cmp_light_phi = 0.0;
  std::uint64_t cmp_seed = 7;
  auto* cmp_cmd = app.add_subcommand("compare", "side-by-side comparison");
  cmp_cmd->add_option("--a", cmp_a)->required();
  cmp_cmd->add_option("--b", cmp_b)->required();
  cmp_cmd->add_option("--out", cmp_out);
  cmp_cmd->add_option("--res-a", cmp_res_a);
  cmp_cmd->add_option("--res-b", cmp_res_b);
  cmp_cmd->add_option("--order", cmp_order);
  cmp_cmd->add_option("--n", cmp_n);
  cmp_cmd->add_option("--light-theta", cmp_light_theta);
  cmp_cmd->add_option("--light-phi", cmp_light_phi);
  cmp_cmd->add_option("--seed", cmp_seed);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_opt);
    if (eval_cmd->parsed())
      return cmd_eval(eval_source, eval_angles, eval_rusink);
    if (render_cmd->parsed())
      return cmd_render(render_source, render_out, render_res, light_theta,
                        light_phi, render_radiance, render_ppm);
    if (furnace_cmd->parsed())
      return cmd_furnace(furnace_source, furnace_out, furnace_res,
                         furnace_order, furnace_ppm);
    if (metrics_cmd->parsed())
      return cmd_metrics(metrics_source, metrics_out, metrics_n, metrics_wi,
                         metrics_order, metrics_seed, metrics_eci_res);
    if (gf_cmd->parsed())
      return cmd_gen_fixture(gf_kind, gf_out, gf_furnace, gf_res, gf_order);
    if (cmp_cmd->parsed())
      return cmd_compare(cmp_a, cmp_b, cmp_out, cmp_res_a, cmp_res_b,
                         cmp_light_theta, cmp_light_phi, cmp_order, cmp_n,
                         cmp_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DivergenceError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace brdffield
