// exsf: sound field interpolation experiments from the command line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "exsf/attenuation.hpp"
#include "exsf/config.hpp"
#include "exsf/errors.hpp"
#include "exsf/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out;
  int jobs = 0;
  std::string methods;
};

exsf::ExperimentConfig load(const Common& c) {
  auto cfg = c.config.empty() ? exsf::default_config() : exsf::load_config(c.config);
  if (!c.seeds.empty()) cfg.seeds = c.seeds;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (!c.methods.empty()) {
    cfg.methods.clear();
    std::stringstream ss(c.methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto m = exsf::parse_method(item);
      if (!m) throw exsf::ConfigError("--methods: unknown method '" + item + "'");
      cfg.methods.push_back(*m);
    }
  }
  cfg.validate();
  return cfg;
}

int jobs_or_default(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment configuration (JSON)");
  cmd->add_option("--seed", c.seeds, "Override the seed list");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--jobs", c.jobs, "Parallel work cells (default: hardware threads)");
  cmd->add_option("--methods", c.methods, "Comma separated subset of proposed,swf_loo,swf_ideal,pnn");
}

void progress(std::size_t done, std::size_t total) {
  std::fprintf(stderr, "\r%zu/%zu cells", done, total);
  if (done == total) std::fprintf(stderr, "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior sound field interpolation experiments"};
  app.require_subcommand(1);

  Common sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "NMSE over the frequency sweep for every array, method and seed");
  add_common(sweep, sweep_opts);

  Common nse_opts;
  double nse_freq = 0.0;
  auto* nse = app.add_subcommand("nse", "NSE maps in the z = 0 plane");
  add_common(nse, nse_opts);
  nse->add_option("--freq-hz", nse_freq, "Frequency (default from the configuration)");

  std::string summary_in;
  std::string summary_out;
  double split = 1600.0;
  auto* summ = app.add_subcommand("summarize", "Aggregate an nmse.csv into mean errors and gaps");
  summ->add_option("input", summary_in, "nmse.csv from a sweep")->required();
  summ->add_option("--out", summary_out, "Write summary.csv here");
  summ->add_option("--split-hz", split, "Band split for the restricted gap");

  std::string validate_path;
  auto* val = app.add_subcommand("validate-config", "Check a configuration and print its canonical form");
  val->add_option("config", validate_path, "Configuration file")->required();

  double alpha = 2.0, beta = 1.0;
  int max_order = 20;
  auto* xi = app.add_subcommand("show-xi", "Print the order attenuation table");
  xi->add_option("--alpha", alpha, "alpha > 0");
  xi->add_option("--beta", beta, "beta > 0");
  xi->add_option("--nu", max_order, "Highest order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      const auto cfg = load(sweep_opts);
      exsf::RunOptions opts{cfg.output_dir, jobs_or_default(sweep_opts.jobs), progress};
      const auto result = exsf::run_sweep(cfg, opts);
      const auto s = exsf::summarize(result.records);
      std::ofstream out(cfg.output_dir / "summary.csv");
      exsf::write_summary_csv(out, s);
      exsf::write_summary_text(std::cout, s);
    } else if (nse->parsed()) {
      const auto cfg = load(nse_opts);
      const double f = nse_freq > 0.0 ? nse_freq : cfg.nse.frequency_hz;
      exsf::RunOptions opts{cfg.output_dir, jobs_or_default(nse_opts.jobs), nullptr};
      const auto r = exsf::run_nse(cfg, f, opts);
      std::printf("NSE at %.1f Hz, %zu masked cells\n", r.frequency_hz, r.masked_cells);
      for (const auto& [name, med] : r.pooled_median) std::printf("  %-10s median %8.3f dB\n", name.c_str(), med);
    } else if (summ->parsed()) {
      const auto s = exsf::summarize(exsf::read_records_csv(summary_in), split);
      if (!summary_out.empty()) {
        std::ofstream out(summary_out);
        exsf::write_summary_csv(out, s);
      }
      exsf::write_summary_text(std::cout, s);
    } else if (val->parsed()) {
      const auto cfg = exsf::load_config(validate_path);
      std::cout << exsf::config_to_json(cfg).dump(2) << "\nconfig_hash " << exsf::config_hash(cfg) << '\n';
    } else if (xi->parsed()) {
      const exsf::XiTable table(alpha, beta, max_order);
      std::printf("order,log10_xi,xi\n");
      for (int n = 0; n <= max_order; ++n) {
        const double lx = table.log_value(n);
        std::printf("%d,%.10g,%.10g\n", n, lx / std::log(10.0), std::exp(lx));
      }
    }
  } catch (const exsf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
