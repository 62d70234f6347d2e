// Copyright 2026 The gdn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// gdn: command-line front end. See README.md for the subcommands.

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdn/cascade.hpp"
#include "gdn/config.hpp"
#include "gdn/data.hpp"
#include "gdn/density.hpp"
#include "gdn/error.hpp"
#include "gdn/mi_curve.hpp"
#include "gdn/model_io.hpp"
#include "gdn/stats.hpp"
#include "gdn/trainer.hpp"
#include "gdn/transform.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumerical = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gdn::format_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gdn::format_error("cannot write '" + path + "'");
  out << text;
}

// A model file is read as a one-stage cascade so that every subcommand
// accepts both formats.
gdn::Cascade load_any(const std::string& path) {
  const std::string bytes = slurp(path);
  if (bytes.compare(0, 4, "GDNC") == 0) return gdn::decode_cascade(bytes);
  return gdn::Cascade{{gdn::decode_model(bytes)}};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

gdn::PatchSet as_patchset(gdn::Matrix data, const std::string& source) {
  gdn::PatchSet p;
  p.data = std::move(data);
  p.source = source;
  return p;
}

struct GenArgs {
  std::string generator = "gsm";
  gdn::Index dim = 2;
  gdn::Index count = 10000;
  std::uint64_t seed = 0;
  std::string scale = "uniform";
  double scale_a = 0.1;
  double scale_b = 3.0;
  std::string mixing = "random";
  double p = 2.0;
  double spread = 0.75;
  std::vector<std::string> images;
  gdn::Index size = 8;
  bool linearize = false;
  double noise_sigma = 0.0;
  double offset = 0.0;
  double scale_factor = 1.0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  gdn::PatchSet set;
  if (a.generator == "gsm") {
    gdn::ScaleDistribution sd;
    if (a.scale == "constant") sd = gdn::ScaleDistribution::constant(a.scale_a);
    else if (a.scale == "uniform") sd = gdn::ScaleDistribution::uniform(a.scale_a, a.scale_b);
    else if (a.scale == "lognormal") sd = gdn::ScaleDistribution::log_normal(a.scale_a);
    else throw gdn::invalid_argument("unknown --scale '" + a.scale + "'");
    set = gdn::gen_gsm(a.dim, sd, a.count, a.seed);
  } else if (a.generator == "ica") {
    gdn::Matrix mixing = gdn::Matrix::Identity(a.dim, a.dim);
    if (a.mixing == "random") {
      std::mt19937_64 rng(gdn::splitmix64(~a.seed));
      std::normal_distribution<double> n01;
      for (gdn::Index i = 0; i < mixing.size(); ++i) mixing.data()[i] = n01(rng);
    } else if (a.mixing != "identity") {
      throw gdn::invalid_argument("unknown --mixing '" + a.mixing + "'");
    }
    set = gdn::gen_ica_laplace(mixing, a.count, a.seed);
  } else if (a.generator == "lp") {
    set = gdn::gen_lp_radial(a.dim, a.p, a.count, a.seed, a.spread);
  } else if (a.generator == "patches") {
    if (a.images.empty()) throw gdn::invalid_argument("gen patches needs --images");
    std::vector<gdn::Image> images;
    std::mt19937_64 rng(gdn::splitmix64(a.seed ^ 0x9e3779b97f4a7c15ULL));
    std::normal_distribution<double> n01;
    for (const std::string& path : a.images) {
      const gdn::PnmImage raw = gdn::read_pnm(path);
      gdn::Image im = a.linearize ? gdn::srgb_to_linear(raw) : gdn::to_unit_gray(raw);
      if (a.noise_sigma > 0.0)
        for (gdn::Index i = 0; i < im.size(); ++i) im.data()[i] += a.noise_sigma * n01(rng);
      images.push_back(std::move(im));
    }
    set = gdn::extract_patches(images, a.size, a.count, a.seed);
    set.data = (set.data.array() - a.offset) * a.scale_factor;
  } else {
    throw gdn::invalid_argument("unknown --generator '" + a.generator + "'");
  }
  gdn::write_patchset(a.out, set);
  std::cout << "wrote " << set.count() << " x " << set.dim() << " to " << a.out << '\n';
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& config_path, const std::string& model_path,
            const std::string& report_path, int threads) {
  gdn::RunConfig rc = config_path.empty() ? gdn::RunConfig{} : gdn::parse_run_config(slurp(config_path));
  if (threads > 0) rc.fit.threads = threads;
  const gdn::PatchSet data = gdn::read_patchset(data_path);
  if (rc.meta.patch_width == 0) {
    const auto w = static_cast<std::uint32_t>(std::lround(std::sqrt(double(data.dim()))));
    if (gdn::Index(w) * gdn::Index(w) == data.dim() && w > 1) rc.meta.patch_width = w;
  }

  std::ostringstream report;
  report << "# resolved config\n";
  for (const std::string& line : split(gdn::format_run_config(rc), '\n')) report << "# " << line << '\n';
  report << "stage,epoch,loss,delta_j,min_logdet,clamped,min_pd_eigenvalue,rejected_steps,halvings\n";

  std::vector<gdn::FitReport> reports;
  gdn::Cascade cascade;
  if (rc.stages == 1) {
    gdn::FitReport r = gdn::fit(data.data, rc.fit);
    cascade.stages.push_back({r.params, rc.fit.tying, rc.meta});
    reports.push_back(std::move(r));
  } else {
    gdn::CascadeFit cf = gdn::fit_cascade(data.data, std::vector<gdn::FitConfig>(std::size_t(rc.stages), rc.fit));
    cascade = std::move(cf.cascade);
    cascade.stages.front().meta = rc.meta;
    reports = std::move(cf.reports);
  }
  bool diverged = false;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& ep = reports[s].epochs;
    for (std::size_t e = 0; e < ep.size(); ++e)
      report << s << ',' << e << ',' << fmt(ep[e].loss) << ',' << fmt(ep[e].delta_j) << ','
             << fmt(ep[e].min_logdet) << ',' << ep[e].clamped << ',' << fmt(ep[e].min_pd_eigenvalue) << ','
             << ep[e].rejected_steps << ',' << ep[e].halvings << '\n';
    if (reports[s].diverged) {
      report << "# stage " << s << " " << reports[s].diagnostic << '\n';
      diverged = true;
    }
  }
  report << "# final delta_j = " << fmt(gdn::cascade_delta_j(cascade, data.data, rc.fit.threads)) << '\n';

  if (cascade.stages.size() == 1) gdn::save_model(model_path, cascade.stages.front());
  else gdn::save_cascade(model_path, cascade);
  emit(report_path, report.str());
  if (diverged) {
    std::cerr << "error: kind=numerical code=4 message=\"fit diverged; last valid parameters saved\"\n";
    return kExitNumerical;
  }
  return 0;
}

int cmd_transform(const std::string& model, const std::string& in, const std::string& out, int threads) {
  const gdn::Cascade c = load_any(model);
  const gdn::PatchSet data = gdn::read_patchset(in);
  gdn::write_patchset(out, as_patchset(gdn::forward_cascade(c, data.data, threads).y, "transform:" + in));
  return 0;
}

int cmd_invert(const std::string& model, const std::string& in, const std::string& out, int threads) {
  const gdn::Cascade c = load_any(model);
  const gdn::PatchSet data = gdn::read_patchset(in);
  gdn::InverseOptions opt;
  opt.threads = threads;
  gdn::write_patchset(out, as_patchset(gdn::invert_cascade(c, data.data, opt), "invert:" + in));
  return 0;
}

int cmd_sample(const std::string& model, gdn::Index count, std::uint64_t seed, const std::string& out,
               int threads) {
  const gdn::Cascade c = load_any(model);
  if (c.stages.empty()) throw gdn::format_error("model has no stages");
  const gdn::Index dim = c.stages.front().params.dim();
  const gdn::Matrix y = gdn::gen_gsm(dim, gdn::ScaleDistribution::constant(1.0), count, seed).data;
  gdn::InverseOptions opt;
  opt.threads = threads;
  gdn::write_patchset(out, as_patchset(gdn::invert_cascade(c, y, opt), "sample"));
  return 0;
}

int cmd_denoise(const std::string& model_path, const std::string& image, double sigma, const std::string& out,
                const std::string& clean_path, std::int64_t noise_seed, const std::string& mode, bool self_check,
                int threads) {
  const gdn::Model model = gdn::load_model(model_path);
  gdn::Image noisy = gdn::to_unit_gray(gdn::read_pnm(image));
  std::optional<gdn::Image> clean;
  if (!clean_path.empty()) clean = gdn::to_unit_gray(gdn::read_pnm(clean_path));
  if (noise_seed >= 0) {
    clean = noisy;
    std::mt19937_64 rng(gdn::splitmix64(static_cast<std::uint64_t>(noise_seed)));
    std::normal_distribution<double> n01;
    for (gdn::Index i = 0; i < noisy.size(); ++i) noisy.data()[i] += sigma * n01(rng);
  }
  gdn::DenoiseConfig cfg;
  cfg.sigma = sigma;
  cfg.score_mode = gdn::score_mode_from_string(mode);
  cfg.self_check = self_check;
  cfg.threads = threads;
  const gdn::Image den = gdn::denoise_image(model, noisy, cfg);
  gdn::write_pnm(out, gdn::from_unit_gray(den));
  std::cout << "metric,value\n";
  if (clean) {
    std::cout << "psnr_noisy," << fmt(gdn::psnr(*clean, noisy)) << '\n'
              << "psnr_denoised," << fmt(gdn::psnr(*clean, den)) << '\n'
              << "ssim_noisy," << fmt(gdn::ssim(*clean, noisy)) << '\n'
              << "ssim_denoised," << fmt(gdn::ssim(*clean, den)) << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& model, const std::string& in, const std::string& out, int threads) {
  const gdn::Cascade c = load_any(model);
  const gdn::PatchSet data = gdn::read_patchset(in);
  if (c.stages.size() == 1) {
    emit(out, gdn::format_eval_report(gdn::marginal_radial_report(c.stages.front().params, data.data, threads)));
    return 0;
  }
  std::ostringstream text;
  text.precision(17);
  text << "metric,component,value\n";
  text << "delta_j,," << gdn::cascade_delta_j(c, data.data, threads) << '\n';
  const std::vector<double> per_stage = gdn::stage_delta_j(c, data.data, threads);
  for (std::size_t s = 0; s < per_stage.size(); ++s) text << "stage_delta_j," << s << ',' << per_stage[s] << '\n';
  emit(out, text.str());
  return 0;
}

int cmd_micurve(const std::vector<std::string>& images, const std::vector<gdn::Index>& distances, gdn::Index pairs,
                const std::string& config_path, std::uint64_t seed, const std::string& out, int threads) {
  gdn::MiCurveConfig cfg;
  if (!config_path.empty()) cfg.fit = gdn::parse_run_config(slurp(config_path)).fit;
  if (threads > 0) cfg.fit.threads = threads;
  if (!distances.empty()) cfg.distances = distances;
  cfg.pairs = pairs;
  cfg.seed = seed;
  std::vector<gdn::Image> ims;
  for (const std::string& path : images) ims.push_back(gdn::to_unit_gray(gdn::read_pnm(path)));
  emit(out, gdn::format_mi_curve(gdn::pairwise_mi_curve(ims, cfg)));
  return 0;
}

const char* kind_name(gdn::ErrorKind k) {
  switch (k) {
    case gdn::ErrorKind::InvalidArgument: return "usage";
    case gdn::ErrorKind::Format: return "format";
    case gdn::ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

int exit_code(gdn::ErrorKind k) {
  switch (k) {
    case gdn::ErrorKind::InvalidArgument: return kExitUsage;
    case gdn::ErrorKind::Format: return kExitFormat;
    case gdn::ErrorKind::Numerical: return kExitNumerical;
  }
  return 1;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized divisive normalization density models"};
  app.require_subcommand(1);
  int threads = 0;  // 0: the config file value, else 1
  app.add_option("--threads", threads, "Worker threads (default: the config file value, else 1); results do not depend on it")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic or image-patch dataset");
  g->add_option("--generator", gen.generator, "gsm, ica, lp or patches")->capture_default_str();
  g->add_option("--dim", gen.dim, "Dimension (gsm, ica, lp)")->capture_default_str();
  g->add_option("--count", gen.count, "Number of samples")->capture_default_str();
  g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  g->add_option("--scale", gen.scale, "GSM scale law: constant, uniform, lognormal")->capture_default_str();
  g->add_option("--scale-a", gen.scale_a, "constant value / uniform low / lognormal sigma")->capture_default_str();
  g->add_option("--scale-b", gen.scale_b, "uniform high")->capture_default_str();
  g->add_option("--mixing", gen.mixing, "ica mixing matrix: random or identity")->capture_default_str();
  g->add_option("--p", gen.p, "lp exponent")->capture_default_str();
  g->add_option("--spread", gen.spread, "lp radial log-scale spread")->capture_default_str();
  g->add_option("--images", gen.images, "patches: PGM/PPM inputs")->delimiter(',');
  g->add_option("--size", gen.size, "patches: patch width")->capture_default_str();
  g->add_flag("--linearize", gen.linearize, "patches: sRGB to linear luminance");
  g->add_option("--noise-sigma", gen.noise_sigma, "patches: additive Gaussian noise on [0,1] images");
  g->add_option("--offset", gen.offset, "patches: subtracted from pixel values")->capture_default_str();
  g->add_option("--scale-factor", gen.scale_factor, "patches: multiplies values after the offset")
      ->capture_default_str();
  g->add_option("--out", gen.out, "Output patch-set file")->required();

  std::string data, config, model, out, report, image, clean, mode = "analytic";
  gdn::Index count = 1000, pairs = 20000;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::int64_t noise_seed = -1;
  bool self_check = false;
  std::vector<std::string> images;
  std::vector<gdn::Index> distances;

  auto* f = app.add_subcommand("fit", "Fit a model to a patch-set file");
  f->add_option("--data", data, "Patch-set file")->required();
  f->add_option("--config", config, "key = value config file");
  f->add_option("--out", model, "Output model file")->required();
  f->add_option("--report", report, "Report file (default stdout)");

  auto* t = app.add_subcommand("transform", "Map data through a model");
  auto* inv = app.add_subcommand("invert", "Map transformed data back through a model");
  for (auto* sc : {t, inv}) {
    sc->add_option("--model", model, "Model or cascade file")->required();
    sc->add_option("--data", data, "Input patch-set file")->required();
    sc->add_option("--out", out, "Output patch-set file")->required();
  }

  auto* s = app.add_subcommand("sample", "Draw samples from a model");
  s->add_option("--model", model, "Model or cascade file")->required();
  s->add_option("--count", count, "Number of samples")->capture_default_str();
  s->add_option("--seed", seed, "Seed")->capture_default_str();
  s->add_option("--out", out, "Output patch-set file")->required();

  auto* d = app.add_subcommand("denoise", "Denoise a grayscale image with a noisy-data patch model");
  d->add_option("--model", model, "Model fitted on noisy patches")->required();
  d->add_option("--image", image, "Noisy PGM (or clean PGM with --add-noise)")->required();
  d->add_option("--sigma", sigma, "Noise standard deviation on the [0,1] scale")->required();
  d->add_option("--out", out, "Output PGM")->required();
  d->add_option("--clean", clean, "Clean reference PGM for PSNR/SSIM");
  d->add_option("--add-noise", noise_seed, "Add noise with this seed and use the input as reference");
  d->add_option("--score", mode, "analytic or fd")->capture_default_str();
  d->add_flag("--self-check", self_check, "Cross-check analytic and fd scores");

  auto* e = app.add_subcommand("eval", "Gaussianization diagnostics as CSV");
  e->add_option("--model", model, "Model or cascade file")->required();
  e->add_option("--data", data, "Patch-set file")->required();
  e->add_option("--out", out, "Report file (default stdout)");

  auto* mi = app.add_subcommand("micurve", "Pairwise MI of filter responses versus distance");
  mi->add_option("--images", images, "PGM/PPM inputs")->delimiter(',')->required();
  mi->add_option("--distances", distances, "Horizontal separations")->delimiter(',');
  mi->add_option("--pairs", pairs, "Pairs per distance")->capture_default_str();
  mi->add_option("--config", config, "Fit config for the 2-D models");
  mi->add_option("--seed", seed, "Seed")->capture_default_str();
  mi->add_option("--out", out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    std::cerr << "error: kind=usage code=2 message=" << quoted(ex.what()) << '\n';
    std::cerr << app.help();
    return kExitUsage;
  }

  const int workers = threads > 0 ? threads : 1;
  try {
    if (*g) return cmd_gen(gen);
    if (*f) return cmd_fit(data, config, model, report, threads);
    if (*t) return cmd_transform(model, data, out, workers);
    if (*inv) return cmd_invert(model, data, out, workers);
    if (*s) return cmd_sample(model, count, seed, out, workers);
    if (*d) return cmd_denoise(model, image, sigma, out, clean, noise_seed, mode, self_check, workers);
    if (*e) return cmd_eval(model, data, out, workers);
    if (*mi) return cmd_micurve(images, distances, pairs, config, seed, out, threads);
  } catch (const gdn::Error& ex) {
    std::cerr << "error: kind=" << kind_name(ex.kind()) << " code=" << exit_code(ex.kind())
              << " message=" << quoted(ex.what()) << '\n';
    return exit_code(ex.kind());
  } catch (const std::exception& ex) {
    std::cerr << "error: kind=internal code=1 message=" << quoted(ex.what()) << '\n';
    return 1;
  }
  return kExitUsage;
}
