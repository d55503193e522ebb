#include "strkm/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "strkm/binio.hpp"
#include "strkm/data.hpp"
#include "strkm/diagnostics.hpp"
#include "strkm/errors.hpp"
#include "strkm/kvconfig.hpp"
#include "strkm/metrics.hpp"
#include "strkm/pgm.hpp"
#include "strkm/probmodel.hpp"
#include "strkm/trainer.hpp"

namespace strkm {

namespace {

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  binio::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  out << path << '\n';
}

std::string read_text(const std::string& path) {
  const std::vector<std::uint8_t> bytes = binio::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto colon = s.find(':', s.empty() ? 0 : 1);
  if (colon == std::string::npos) throw ConfigError("range must look like a:b, got '" + s + "'");
  const kv::Entry a{"--range", s.substr(0, colon), 0};
  const kv::Entry b{"--range", s.substr(colon + 1), 0};
  try {
    return {kv::to_double(a), kv::to_double(b)};
  } catch (const ParseError&) {
    throw ConfigError("range must look like a:b, got '" + s + "'");
  }
}

// Sigma used for sampling: the trained noise level unless overridden.
double sampling_sigma(const Checkpoint& ckpt, double override_sigma) {
  return override_sigma >= 0.0 ? override_sigma : ckpt.config.objective.loss.sigma;
}

void check_dims(const Checkpoint& ckpt, const FactorDataset& ds) {
  if (ds.pixel_count() != ckpt.model.input_dim()) {
    throw ConfigError("dataset images have " + std::to_string(ds.pixel_count()) +
                      " pixels, checkpoint expects " + std::to_string(ckpt.model.input_dim()));
  }
}

int image_side(const Checkpoint& ckpt, int& h, int& w) {
  h = w = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ckpt.model.input_dim()))));
  if (static_cast<Eigen::Index>(h) * w != ckpt.model.input_dim()) {
    throw UnsupportedError("image output needs square images");
  }
  return h;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stiefel-restricted kernel machine training and evaluation", "strkm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // gen-data
  std::string gd_out;
  auto* gen = app.add_subcommand("gen-data", "Write the shapes2f dataset (SFDS1)");
  gen->add_option("--out", gd_out, "Output path")->required();

  // train
  std::string tr_config, tr_dataset, tr_out, tr_loss;
  std::vector<std::string> tr_set;
  int tr_epochs = -1;
  bool tr_fixed = false, tr_quiet = false;
  auto* tr = app.add_subcommand("train", "Train a model and write a STRKM1 checkpoint");
  tr->add_option("--config", tr_config, "key = value config file");
  tr->add_option("--dataset", tr_dataset, "SFDS1 dataset")->required();
  tr->add_option("--out", tr_out, "Checkpoint path")->required();
  tr->add_option("--loss-csv", tr_loss, "Loss log path (default <out>.loss.csv)");
  tr->add_option("--epochs", tr_epochs, "Override train.epochs");
  tr->add_option("--set", tr_set, "Override a config key (key=value)");
  tr->add_flag("--fixed-u", tr_fixed, "Frozen random U with the mollified projector");
  tr->add_flag("--quiet", tr_quiet, "No progress on standard error");

  // Shared by the evaluation commands.
  std::string ck, ds_path, out_path;
  std::uint64_t seed = 0;
  double sigma_override = -1.0;
  auto add_model_io = [&](CLI::App* c, bool need_dataset) {
    c->add_option("--checkpoint", ck, "STRKM1 checkpoint")->required();
    auto* d = c->add_option("--dataset", ds_path, "SFDS1 dataset");
    if (need_dataset) d->required();
    c->add_option("--out", out_path, "Output path (CSV to stdout if omitted)");
    c->add_option("--seed", seed, "Random seed");
  };

  double dci_penalty = kDefaultLassoPenalty;
  auto* edci = app.add_subcommand("eval-dci", "DCI scores of the latent codes (CSV)");
  add_model_io(edci, true);
  edci->add_option("--penalty", dci_penalty, "Lasso penalty");

  int swd_samples = 512, swd_proj = 128;
  auto* eswd = app.add_subcommand("eval-swd", "SWD of generated and noise images to the data (CSV)");
  add_model_io(eswd, true);
  eswd->add_option("--samples", swd_samples, "Generated images");
  eswd->add_option("--projections", swd_proj, "Random projections");
  eswd->add_option("--sigma", sigma_override, "Prior sigma (default: trained sigma)");

  int gen_count = 16, cols = 8;
  auto* genimg = app.add_subcommand("generate", "Sample images from the fitted prior (PGM)");
  add_model_io(genimg, false);
  genimg->get_option("--out")->required();
  genimg->add_option("--count", gen_count, "Number of images");
  genimg->add_option("--cols", cols, "Grid columns");
  genimg->add_option("--sigma", sigma_override, "Prior sigma (default: trained sigma)");

  int component = 1, steps = 9;
  std::string range;
  bool origin = false;
  auto* trav = app.add_subcommand("traverse", "Decode a sweep along one principal direction (PGM)");
  add_model_io(trav, false);
  trav->get_option("--out")->required();
  trav->add_option("--component", component, "1-based principal component");
  trav->add_option("--steps", steps, "Number of images");
  trav->add_option("--range", range, "Sweep a:b (default +-3 prior std)");
  trav->add_flag("--origin", origin, "Sweep through the origin instead of the latent mean");
  trav->add_option("--sigma", sigma_override, "Prior sigma (default: trained sigma)");

  int rec_count = 8;
  auto* rec = app.add_subcommand("reconstruct", "Originals above reconstructions (PGM)");
  add_model_io(rec, true);
  rec->get_option("--out")->required();
  rec->add_option("--count", rec_count, "Number of images");

  int lemma_index = 0;
  double lemma_sigma = 0.1;
  std::int64_t lemma_samples = 100000;
  auto* lemma = app.add_subcommand("diagnose-lemma", "Second-order expansion check (CSV)");
  add_model_io(lemma, true);
  lemma->add_option("--index", lemma_index, "Dataset image used as x");
  lemma->add_option("--sigma", lemma_sigma, "Noise scale");
  lemma->add_option("--samples", lemma_samples, "Monte Carlo samples");

  ElboParams elbo;
  int elbo_samples = 16;
  auto* elb = app.add_subcommand("elbo-report", "Lower-bound terms I, II, III (CSV)");
  add_model_io(elb, true);
  elb->add_option("--gamma", elbo.gamma, "Encoder std");
  elb->add_option("--sigma", elbo.sigma, "Posterior std inside range(U)");
  elb->add_option("--delta", elbo.delta, "Posterior std outside range(U)");
  elb->add_option("--samples", elbo_samples, "Monte Carlo draws per image");

  auto* exl = app.add_subcommand("export-latents", "Codes h and ground-truth factors (CSV)");
  add_model_io(exl, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      save_dataset(gen_shapes2f(), gd_out);
      out << gd_out << '\n';
      return kExitOk;
    }
    if (*tr) {
      TrainConfig cfg;
      if (!tr_config.empty()) cfg.apply(read_text(tr_config));
      for (const std::string& kvs : tr_set) {
        const auto eq = kvs.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kvs + "'");
        const kv::Entry e = kv::parse(kvs).at(0);
        cfg.set(e.key, e.value);
      }
      if (tr_epochs >= 0) cfg.epochs = tr_epochs;
      if (tr_fixed) cfg.objective.fixed_u.enabled = true;
      if (!tr_quiet && cfg.log_every == 0) cfg.log_every = 100;
      const FactorDataset ds = load_dataset(tr_dataset);
      ProgressFn progress;
      if (!tr_quiet) {
        progress = [&err](const LossRecord& r) {
          err << "step " << r.step << " epoch " << r.epoch << " objective " << r.objective << '\n';
        };
      }
      const TrainResult res = train(ds, cfg, progress);
      save_checkpoint(res.checkpoint, tr_out);
      const std::string loss_path = tr_loss.empty() ? tr_out + ".loss.csv" : tr_loss;
      write_loss_csv(res.log, loss_path);
      out << tr_out << '\n' << loss_path << '\n';
      return kExitOk;
    }

    const Checkpoint ckpt = load_checkpoint(ck);
    FactorDataset ds;
    if (!ds_path.empty()) {
      ds = load_dataset(ds_path);
      check_dims(ckpt, ds);
    }
    const StRkmModel& model = ckpt.model;

    if (*edci) {
      const DciScores s = dci(latent_codes(model, ds.images), ds.factor_values(), dci_penalty, seed);
      std::vector<MetricRow> rows{{"disentanglement", s.disentanglement, 0.0},
                                  {"completeness", s.completeness, 0.0}};
      for (Eigen::Index f = 0; f < ds.num_factors(); ++f) {
        rows.push_back({"informativeness_rmse_" + ds.factors[static_cast<std::size_t>(f)].name,
                        s.informativeness[f], 0.0});
      }
      write_text(out_path, metrics_csv(rows), out);
      return kExitOk;
    }
    if (*eswd) {
      const GaussianLatent prior = stored_latent_prior(model, sampling_sigma(ckpt, sigma_override));
      const Mat generated = generate(model, prior, swd_samples, seed);
      Rng noise_rng(seed, 7);
      Mat noise(ds.size(), ds.pixel_count());
      for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = noise_rng.uniform(0.0, 1.0);
      const SwdResult g = swd(generated, ds.images, swd_proj, seed);
      const SwdResult u = swd(noise, ds.images, swd_proj, seed);
      write_text(out_path, metrics_csv({{"swd_generated", g.value, g.stderr_}, {"swd_noise", u.value, u.stderr_}}), out);
      return kExitOk;
    }
    if (*genimg || *trav) {
      int h = 0, w = 0;
      image_side(ckpt, h, w);
      const GaussianLatent prior = stored_latent_prior(model, sampling_sigma(ckpt, sigma_override));
      GrayImage img;
      if (*genimg) {
        if (gen_count < 1) throw ConfigError("--count must be >= 1");
        img = tile_images(generate(model, prior, gen_count, seed), h, w, cols);
      } else {
        double a = 0.0, b = 0.0;
        if (range.empty()) {
          b = traverse_half_width(prior, component);
          a = -b;
        } else {
          std::tie(a, b) = parse_range(range);
        }
        img = tile_images(traverse(model, prior, component, a, b, steps, origin), h, w, steps);
      }
      write_pgm(img, out_path);
      out << out_path << '\n';
      return kExitOk;
    }
    if (*rec) {
      int h = 0, w = 0;
      image_side(ckpt, h, w);
      if (rec_count < 1 || rec_count > ds.size()) throw ConfigError("--count out of range");
      Mat both(2 * rec_count, ds.pixel_count());
      both.topRows(rec_count) = ds.images.topRows(rec_count);
      both.bottomRows(rec_count) = reconstruct_batch(model, ds.images.topRows(rec_count));
      write_pgm(tile_images(both, h, w, rec_count), out_path);
      out << out_path << '\n';
      return kExitOk;
    }
    if (*lemma) {
      if (lemma_index < 0 || lemma_index >= ds.size()) throw ConfigError("--index out of range");
      const Vec x = ds.images.row(lemma_index).transpose();
      const Vec y = project(model, encode(model, x));
      const ExpansionReport r =
          lemma_expansion_check(model.decoder, model.u.matrix(), x, y, lemma_sigma, lemma_samples, seed);
      write_text(out_path, r.to_csv(), out);
      return kExitOk;
    }
    if (*elb) {
      const LowerBound lb = lower_bound(model, ds.images, elbo, elbo_samples, seed);
      const std::string csv = "term,value\nI," + kv::format(lb.term1) + "\nII," + kv::format(lb.term2) +
                              "\nIII," + kv::format(lb.term3) + "\ntotal," + kv::format(lb.total) + '\n';
      write_text(out_path, csv, out);
      return kExitOk;
    }
    if (*exl) {
      const Mat codes = latent_codes(model, ds.images);
      std::string csv;
      for (Eigen::Index j = 0; j < codes.cols(); ++j) csv += (j ? ",h" : "h") + std::to_string(j + 1);
      for (const FactorSpec& f : ds.factors) csv += ',' + f.name;
      csv += '\n';
      for (Eigen::Index i = 0; i < codes.rows(); ++i) {
        for (Eigen::Index j = 0; j < codes.cols(); ++j) csv += (j ? "," : "") + kv::format(codes(i, j));
        for (Eigen::Index f = 0; f < ds.levels.cols(); ++f) csv += ',' + std::to_string(ds.levels(i, f));
        csv += '\n';
      }
      write_text(out_path, csv, out);
      return kExitOk;
    }
    err << "no subcommand\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DegeneracyError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ContractError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace strkm
