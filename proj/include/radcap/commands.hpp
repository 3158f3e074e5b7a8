#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "radcap/config.hpp"

namespace radcap::cli {

// Subcommand bodies. Errors surface as radcap exceptions; the frontend maps
// them onto exit codes (0 ok, 2 input format, 3 config, 4 internal).

int cmd_validate_manifest(const RunConfig& cfg, const std::filesystem::path& manifest_path,
                          std::ostream& out);

// variant: "5ch", "66ch" or "both". Corrupt inputs are reported per file and
// skipped; the remaining frames are still emitted (exit 2 if any failed).
int cmd_preprocess(const RunConfig& cfg, const std::filesystem::path& input_dir,
                   const std::filesystem::path& output_dir, const std::string& variant,
                   std::ostream& out, std::ostream& err);

int cmd_gen_gt(const RunConfig& cfg, const std::filesystem::path& labels_path,
               const std::filesystem::path& manifest_path,
               const std::filesystem::path& output_dir, std::ostream& out);

int cmd_parse(const RunConfig& cfg, const std::filesystem::path& captions_path,
              const std::filesystem::path& output_path, std::ostream& out);

int cmd_eval(const RunConfig& cfg, const std::filesystem::path& pred_path,
             const std::filesystem::path& gt_path, const std::filesystem::path& manifest_path,
             const std::filesystem::path& output_dir, std::ostream& out);

int cmd_report(const RunConfig& cfg, const std::filesystem::path& metrics_csv_path,
               std::ostream& out);

int cmd_diagnose_norms(const RunConfig& cfg, const std::filesystem::path& tokens_path,
                       const std::filesystem::path& reference_path, double threshold,
                       std::ostream& out);

int cmd_swap_test(const RunConfig& cfg, const std::filesystem::path& real_path,
                  const std::filesystem::path& zeros_path,
                  const std::filesystem::path& noise_path, double threshold, std::ostream& out);

}  // namespace radcap::cli
