#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace spdcopt::cli {

/// Verification suite reported a failure.
class VerificationFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunContext {
  Json config;
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  std::ostream* out = nullptr;
};

void cmd_width(const RunContext& ctx);
void cmd_optimize(const RunContext& ctx);
void cmd_crystal_sigma(const RunContext& ctx);
void cmd_qkd_rate(const RunContext& ctx);
void cmd_qkd_maxdist(const RunContext& ctx);
void cmd_figure(const RunContext& ctx, const std::string& id);
void cmd_verify(const RunContext& ctx);

/// Figure ids accepted by cmd_figure.
const std::vector<std::string>& figure_ids();

/// `name = value unit` report line.
void report(std::ostream& os, const std::string& name, double value, const std::string& unit = "");

} // namespace spdcopt::cli
