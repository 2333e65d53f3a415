#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include <spdcopt/errors.hpp>

#include "commands.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kDomain = 3, kIo = 4, kVerification = 5 };

} // namespace

int main(int argc, char** argv) {
  using namespace spdcopt::cli;

  CLI::App app{"Temporal widths, source optimization and QKD link budgets for SPDC photon pairs", "spdcopt"};
  app.set_version_flag("--version", SPDCOPT_VERSION);
  app.require_subcommand(1);
  app.fallthrough(); // global options may follow the subcommand

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON scenario file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory for figure tables");
  app.add_option("--override", overrides, "dotted-path assignment, e.g. source.sigma=100GHz")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::Range(1u, 256u));

  auto* width = app.add_subcommand("width", "arrival-time widths for one scenario");
  auto* optimize = app.add_subcommand("optimize", "optimal pump duration and source parameters");
  auto* figure = app.add_subcommand("figure", "write a figure table (CSV + JSON sidecar)");
  std::string figure_id;
  figure->add_option("id", figure_id, "figure id")->required()->check(CLI::IsMember(figure_ids()));
  auto* crystal = app.add_subcommand("crystal-sigma", "phase-matching width of the BBO source");
  auto* rate = app.add_subcommand("qkd-rate", "acceptance probability, QBER and key rate");
  auto* maxdist = app.add_subcommand("qkd-maxdist", "maximal security distance");
  auto* verify = app.add_subcommand("verify", "run the oracle, classification and Monte-Carlo suites");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    RunContext ctx{load_config(config_path, overrides), out_dir, threads, &std::cout};
    if (width->parsed()) cmd_width(ctx);
    else if (optimize->parsed()) cmd_optimize(ctx);
    else if (figure->parsed()) cmd_figure(ctx, figure_id);
    else if (crystal->parsed()) cmd_crystal_sigma(ctx);
    else if (rate->parsed()) cmd_qkd_rate(ctx);
    else if (maxdist->parsed()) cmd_qkd_maxdist(ctx);
    else if (verify->parsed()) cmd_verify(ctx);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const VerificationFailure& e) {
    std::cerr << e.what() << '\n';
    return kVerification;
  } catch (const spdcopt::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const spdcopt::ConvergenceError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const spdcopt::ConsistencyError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  }
}
