#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bimef/fusion.hpp"
#include "bimef/metrics.hpp"

namespace bimef::cli {

struct EnhanceFlags {
    EnhanceConfig config;
    bool report_k = false;
    bool dump_intermediates = false;
    bool timings = false;
};

struct BatchFlags {
    EnhanceFlags enhance;
    int jobs = 0;  // 0: hardware concurrency
};

struct MetricsFlags {
    LoeConfig loe;
    bool csv = false;
};

int run_enhance(const std::filesystem::path& input, const std::filesystem::path& output,
                const EnhanceFlags& flags, std::ostream& out, std::ostream& err);

int run_batch(const std::filesystem::path& input_dir, const std::filesystem::path& output_dir,
              const BatchFlags& flags, std::ostream& out, std::ostream& err);

int run_metrics(const std::filesystem::path& original, const std::filesystem::path& enhanced,
                const MetricsFlags& flags, std::ostream& out, std::ostream& err);

/// Parses `args` (args[0] is the program name) and dispatches to a subcommand.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bimef::cli
