// Command-line front end: simulate benchmark data sets, fit the model,
// and summarize stored chains.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynmix/dynmix.hpp"

namespace {

using dynmix::ChainStore;
using dynmix::ConfigError;
using dynmix::CsvBuilder;
using dynmix::DataError;
using dynmix::DataMode;
using dynmix::FitConfig;
using dynmix::LinkKind;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct SimulateOptions {
  std::string design = "mixture";
  std::string curve = "linear";
  int length = 400;
  int trials = 15;
  std::uint64_t seed = 1;
  std::string out = "data.csv";
};

struct FitOptions {
  std::string data;
  std::string mode = "mixture";
  std::string link;
  int trials = 1;
  int order = 2;
  long iterations = 220000;
  long burn_in = 20000;
  long thin = 200;
  std::uint64_t seed = 1;
  int chains = 1;
  double mass = 0.90;
  bool full_draws = false;
  std::string priors;
  std::string out_dir = ".";
};

struct SummarizeOptions {
  std::string chain;
  std::string alpha_draws;
  std::string alpha_out = "alpha_summary.csv";
  double mass = 0.90;
  std::string out;
};

std::string chain_suffix(int chains, int c) {
  return (chains == 1) ? "" : "_" + std::to_string(c);
}

// Scalar-parameter summary rows (median + HPD bounds) from named draw
// columns; shared by `fit` and `summarize` so both produce identical
// bytes for identical draws.
std::string summary_csv(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& columns,
                        double mass) {
  const std::vector<std::string> header{"parameter", "point", "lower",
                                        "upper"};
  CsvBuilder b(header);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const dynmix::ParamSummary s = dynmix::summarize_draws(columns[i], mass);
    const double row[3] = {s.median, s.hpd.lower, s.hpd.upper};
    b.labeled_row(names[i], row);
  }
  return b.str();
}

// Pointwise weight-curve summary from a kept x T draw matrix.
std::string alpha_summary_csv(std::span<const double> draws, int T,
                              double mass) {
  const dynmix::CurveSummary cs = dynmix::summarize_curve(draws, T, mass);
  const std::vector<std::string> header{"index", "median", "lower", "upper"};
  CsvBuilder b(header);
  for (int t = 0; t < T; ++t) {
    const double row[4] = {static_cast<double>(t + 1), cs.median[t],
                           cs.lower[t], cs.upper[t]};
    b.row(row);
  }
  return b.str();
}

std::string alpha_draws_csv(const ChainStore& chain) {
  std::vector<std::string> header{"draw"};
  for (int t = 0; t < chain.T; ++t) {
    header.push_back("alpha_" + std::to_string(t + 1));
  }
  CsvBuilder b(header);
  std::vector<double> row(static_cast<std::size_t>(chain.T) + 1);
  for (long i = 0; i < chain.kept; ++i) {
    row[0] = static_cast<double>(i + 1);
    const auto draw = chain.alpha_draw(i);
    for (int t = 0; t < chain.T; ++t) row[static_cast<std::size_t>(t) + 1] = draw[t];
    b.row(row);
  }
  return b.str();
}

void chain_columns(const ChainStore& chain, std::vector<std::string>& names,
                   std::vector<std::vector<double>>& columns) {
  const auto matrix_col = [&](const std::vector<double>& m, int width,
                              int j) {
    std::vector<double> col(static_cast<std::size_t>(chain.kept));
    for (long i = 0; i < chain.kept; ++i) {
      col[static_cast<std::size_t>(i)] =
          m[static_cast<std::size_t>(i) * width + j];
    }
    return col;
  };
  if (chain.mode == DataMode::mixture) {
    names.insert(names.end(), {"mu1", "phi1", "mu2", "phi2"});
    columns.push_back(chain.mu1);
    columns.push_back(chain.phi1);
    columns.push_back(chain.mu2);
    columns.push_back(chain.phi2);
  }
  for (int j = 0; j < chain.order; ++j) {
    names.push_back("theta0_" + std::to_string(j + 1));
    columns.push_back(matrix_col(chain.theta0, chain.order, j));
  }
  for (int j = 0; j < chain.order; ++j) {
    names.push_back("w_" + std::to_string(j + 1));
    columns.push_back(matrix_col(chain.w, chain.order, j));
  }
  if (chain.mode == DataMode::gaussian) {
    names.push_back("v");
    columns.push_back(chain.v);
  }
}

std::string chain_csv(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns,
                      long kept) {
  std::vector<std::string> header{"draw"};
  header.insert(header.end(), names.begin(), names.end());
  CsvBuilder b(header);
  std::vector<double> row(names.size() + 1);
  for (long i = 0; i < kept; ++i) {
    row[0] = static_cast<double>(i + 1);
    for (std::size_t j = 0; j < names.size(); ++j) {
      row[j + 1] = columns[j][static_cast<std::size_t>(i)];
    }
    b.row(row);
  }
  return b.str();
}

void apply_priors_file(const std::string& path, FitConfig& cfg) {
  const auto pairs = dynmix::parse_priors_file(dynmix::read_file(path), path);
  const auto indexed = [&](const std::string& key, const std::string& stem,
                           int limit) -> int {
    if (key.rfind(stem, 0) != 0) return -1;
    const std::string tail = key.substr(stem.size());
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) {
      throw DataError(path + ": bad prior key: " + key);
    }
    const int idx = std::stoi(tail);
    if (idx < 1 || idx > limit) {
      throw DataError(path + ": index out of range in key: " + key);
    }
    return idx - 1;
  };
  for (const auto& [key, value] : pairs) {
    int j;
    if ((j = indexed(key, "theta0_mean_", cfg.order)) >= 0) {
      cfg.dlm_priors.initial_mean[j] = value;
    } else if ((j = indexed(key, "theta0_var_", cfg.order)) >= 0) {
      cfg.dlm_priors.initial_var[j] = value;
    } else if ((j = indexed(key, "w_shape_", cfg.order)) >= 0) {
      cfg.dlm_priors.w_shape[j] = value;
    } else if ((j = indexed(key, "w_rate_", cfg.order)) >= 0) {
      cfg.dlm_priors.w_rate[j] = value;
    } else if (key == "v_shape") {
      cfg.dlm_priors.v_shape = value;
    } else if (key == "v_rate") {
      cfg.dlm_priors.v_rate = value;
    } else if ((j = indexed(key, "mu_mean_", 2)) >= 0) {
      cfg.mix_priors.mu_mean[static_cast<std::size_t>(j)] = value;
      cfg.mix_priors_from_data = false;
    } else if ((j = indexed(key, "mu_var_", 2)) >= 0) {
      cfg.mix_priors.mu_var[static_cast<std::size_t>(j)] = value;
      cfg.mix_priors_from_data = false;
    } else if ((j = indexed(key, "phi_shape_", 2)) >= 0) {
      cfg.mix_priors.phi_shape[static_cast<std::size_t>(j)] = value;
    } else if ((j = indexed(key, "phi_rate_", 2)) >= 0) {
      cfg.mix_priors.phi_rate[static_cast<std::size_t>(j)] = value;
    } else {
      throw DataError(path + ": unknown prior key: " + key);
    }
  }
}

int cmd_simulate(const SimulateOptions& opt) {
  if (opt.length < 1) throw ConfigError("--length must be >= 1");
  dynmix::RngStream rng(opt.seed);
  const dynmix::WeightCurveKind kind = dynmix::parse_weight_curve(opt.curve);

  dynmix::SyntheticData data;
  std::vector<std::string> header;
  if (opt.design == "mixture") {
    data = dynmix::simulate_mixture(rng, kind, opt.length);
    header = {"index", "y", "alpha", "z"};
  } else if (opt.design == "gaussian") {
    data = dynmix::simulate_gaussian(rng, kind, opt.length);
    header = {"index", "y", "alpha"};
  } else if (opt.design == "binomial") {
    data = dynmix::simulate_binomial(rng, kind, opt.length, opt.trials);
    header = {"index", "count", "trials", "alpha"};
  } else {
    throw ConfigError("unknown design: " + opt.design);
  }

  CsvBuilder b(header);
  for (int t = 0; t < opt.length; ++t) {
    std::vector<double> row;
    row.push_back(static_cast<double>(t + 1));
    if (opt.design == "binomial") {
      row.push_back(static_cast<double>(data.counts[t]));
      row.push_back(static_cast<double>(data.trials));
    } else {
      row.push_back(data.y[t]);
    }
    row.push_back(data.alpha[t]);
    if (opt.design == "mixture") row.push_back(static_cast<double>(data.z[t]));
    b.row(row);
  }
  dynmix::write_file_atomic(opt.out, b.str());
  std::fprintf(stderr, "[simulate] wrote %d rows to %s\n", opt.length,
               opt.out.c_str());
  return 0;
}

int cmd_fit(const FitOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();

  DataMode mode;
  if (opt.mode == "mixture") {
    mode = DataMode::mixture;
  } else if (opt.mode == "binomial") {
    mode = (opt.trials == 1) ? DataMode::bernoulli : DataMode::binomial;
  } else if (opt.mode == "gaussian") {
    mode = DataMode::gaussian;
  } else {
    throw ConfigError("unknown mode: " + opt.mode);
  }

  FitConfig cfg;
  cfg.iterations = opt.iterations;
  cfg.burn_in = opt.burn_in;
  cfg.thin = opt.thin;
  cfg.order = opt.order;
  cfg.seed = opt.seed;
  cfg.trials = opt.trials;
  cfg.dlm_priors = dynmix::DlmPriors::defaults(opt.order);
  if (opt.link.empty()) {
    cfg.link = (mode == DataMode::gaussian) ? LinkKind::identity
                                            : LinkKind::logit;
  } else {
    cfg.link = dynmix::parse_link(opt.link);
  }
  if (!opt.priors.empty()) apply_priors_file(opt.priors, cfg);
  if (opt.chains < 1) throw ConfigError("--chains must be >= 1");
  if (!(opt.mass > 0.0 && opt.mass <= 1.0)) {
    throw ConfigError("--mass must lie in (0, 1]");
  }
  cfg.validate(mode);

  const std::string raw = dynmix::read_file(opt.data);
  const dynmix::CsvTable table = dynmix::parse_csv(raw, opt.data);
  std::vector<double> y;
  std::vector<int> counts;
  if (mode == DataMode::mixture || mode == DataMode::gaussian) {
    y = table.column("y");
  } else {
    counts = dynmix::to_int_column(table.column("count"), "count");
  }
  if (table.rows < 1) throw DataError(opt.data + ": no data rows");

  std::filesystem::create_directories(opt.out_dir);

  // One seed per chain, derived deterministically; chain 1 uses the seed
  // exactly as given.
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(opt.chains));
  dynmix::RngStream seeder(opt.seed);
  for (int c = 0; c < opt.chains; ++c) {
    seeds[static_cast<std::size_t>(c)] =
        (c == 0) ? opt.seed : seeder.substream(0xC0 + c).seed();
  }

  std::vector<ChainStore> results(static_cast<std::size_t>(opt.chains));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(opt.chains));
  {
    std::vector<std::thread> workers;
    for (int c = 0; c < opt.chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          FitConfig chain_cfg = cfg;
          chain_cfg.seed = seeds[static_cast<std::size_t>(c)];
          const auto progress = [&, c](long iter, long total) {
            if (iter % 1000 == 0) {
              std::fprintf(stderr, "[fit] chain %d: iteration %ld/%ld\n",
                           c + 1, iter, total);
            }
          };
          switch (mode) {
            case DataMode::mixture:
              results[static_cast<std::size_t>(c)] =
                  dynmix::run_mixture_fit(chain_cfg, y, progress);
              break;
            case DataMode::gaussian:
              results[static_cast<std::size_t>(c)] =
                  dynmix::run_gaussian_fit(chain_cfg, y, progress);
              break;
            default:
              results[static_cast<std::size_t>(c)] =
                  dynmix::run_binomial_fit(chain_cfg, counts, progress);
          }
        } catch (...) {
          failures[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  const std::filesystem::path dir(opt.out_dir);
  std::vector<std::string> outputs;
  for (int c = 0; c < opt.chains; ++c) {
    const ChainStore& chain = results[static_cast<std::size_t>(c)];
    const std::string sfx = chain_suffix(opt.chains, c + 1);

    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    chain_columns(chain, names, columns);

    const std::string chain_name = "chain" + sfx + ".csv";
    const std::string alpha_name = "alpha" + sfx + ".csv";
    const std::string summary_name = "summary" + sfx + ".csv";
    dynmix::write_file_atomic((dir / chain_name).string(),
                              chain_csv(names, columns, chain.kept));
    dynmix::write_file_atomic(
        (dir / alpha_name).string(),
        opt.full_draws ? alpha_draws_csv(chain)
                       : alpha_summary_csv(chain.alpha, chain.T, opt.mass));
    dynmix::write_file_atomic((dir / summary_name).string(),
                              summary_csv(names, columns, opt.mass));
    outputs.insert(outputs.end(), {chain_name, alpha_name, summary_name});
  }

  const double duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  nlohmann::json manifest;
  manifest["version"] = dynmix::kVersion;
  manifest["command"] = "fit";
  manifest["mode"] = dynmix::data_mode_name(mode);
  manifest["link"] = dynmix::link_name(cfg.link);
  manifest["order"] = cfg.order;
  manifest["iterations"] = cfg.iterations;
  manifest["burn_in"] = cfg.burn_in;
  manifest["thin"] = cfg.thin;
  manifest["kept"] = cfg.kept();
  manifest["seed"] = cfg.seed;
  manifest["chain_seeds"] = seeds;
  manifest["trials"] = cfg.trials;
  manifest["chains"] = opt.chains;
  manifest["mass"] = opt.mass;
  manifest["full_draws"] = opt.full_draws;
  manifest["data_path"] = opt.data;
  manifest["data_checksum_fnv1a64"] = dynmix::fnv1a64_hex(raw);
  manifest["priors_path"] = opt.priors;
  manifest["outputs"] = outputs;
  manifest["duration_seconds"] = duration;
  dynmix::write_file_atomic((dir / "manifest.json").string(),
                            manifest.dump(2) + "\n");

  std::fprintf(stderr, "[fit] done: %d chain(s), %ld kept draws each, %.1fs\n",
               opt.chains, results[0].kept, duration);
  return 0;
}

int cmd_summarize(const SummarizeOptions& opt) {
  const dynmix::CsvTable table = dynmix::read_csv(opt.chain);
  if (table.rows < 1) throw DataError(opt.chain + ": no draws");
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "draw") continue;
    names.push_back(table.header[i]);
    columns.push_back(table.columns[i]);
  }
  if (names.empty()) throw DataError(opt.chain + ": no parameter columns");
  const std::string text = summary_csv(names, columns, opt.mass);
  if (opt.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    dynmix::write_file_atomic(opt.out, text);
  }

  if (!opt.alpha_draws.empty()) {
    const dynmix::CsvTable a = dynmix::read_csv(opt.alpha_draws);
    int T = 0;
    for (const auto& h : a.header) {
      if (h.rfind("alpha_", 0) == 0) T += 1;
    }
    if (T == 0 || a.rows < 1) {
      throw DataError(opt.alpha_draws + ": no alpha draw columns");
    }
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(a.rows) * T);
    for (long i = 0; i < a.rows; ++i) {
      for (int t = 0; t < T; ++t) {
        draws.push_back(
            a.column("alpha_" + std::to_string(t + 1))[static_cast<std::size_t>(i)]);
      }
    }
    dynmix::write_file_atomic(opt.alpha_out,
                              alpha_summary_csv(draws, T, opt.mass));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying mixture weight inference via dynamic trends"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dynmix::kVersion);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate a benchmark data set from a weight curve");
  simulate->add_option("--design", sim.design,
                       "mixture | gaussian | binomial");
  simulate->add_option("--curve", sim.curve,
                       "linear | parabolic | sinusoidal | steps");
  simulate->add_option("--length", sim.length, "number of time points");
  simulate->add_option("--trials", sim.trials, "binomial trials per point");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "output CSV path");

  FitOptions fit;
  CLI::App* fitcmd = app.add_subcommand("fit", "Run the Gibbs sampler");
  fitcmd->add_option("--data", fit.data, "input CSV path")->required();
  fitcmd->add_option("--mode", fit.mode, "mixture | binomial | gaussian");
  fitcmd->add_option("--link", fit.link, "logit | probit");
  fitcmd->add_option("--trials", fit.trials, "binomial trials per point");
  fitcmd->add_option("--order", fit.order, "trend order p");
  fitcmd->add_option("--iterations", fit.iterations, "total iterations");
  fitcmd->add_option("--burn-in", fit.burn_in, "discarded iterations");
  fitcmd->add_option("--thin", fit.thin, "thinning interval");
  fitcmd->add_option("--seed", fit.seed, "random seed");
  fitcmd->add_option("--chains", fit.chains, "parallel chains");
  fitcmd->add_option("--mass", fit.mass, "HPD mass for summaries");
  fitcmd->add_flag("--full-draws", fit.full_draws,
                   "write per-draw weight curves instead of the summary");
  fitcmd->add_option("--priors", fit.priors, "key-value priors file");
  fitcmd->add_option("--out-dir", fit.out_dir, "output directory");

  SummarizeOptions summ;
  CLI::App* summarize =
      app.add_subcommand("summarize", "Summarize a stored chain CSV");
  summarize->add_option("--chain", summ.chain, "chain CSV path")->required();
  summarize->add_option("--alpha-draws", summ.alpha_draws,
                        "per-draw weight curve CSV (from --full-draws)");
  summarize->add_option("--alpha-out", summ.alpha_out,
                        "weight curve summary output path");
  summarize->add_option("--mass", summ.mass, "HPD mass");
  summarize->add_option("--out", summ.out, "summary output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (fitcmd->parsed()) return cmd_fit(fit);
    if (summarize->parsed()) return cmd_summarize(summ);
    std::fprintf(stderr, "no subcommand\n");
    return kExitUsage;
  } catch (const dynmix::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const dynmix::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const dynmix::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
