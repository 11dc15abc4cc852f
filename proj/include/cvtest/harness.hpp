#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cvtest/bootstrap.hpp"
#include "cvtest/generators.hpp"

namespace cvtest {

/// A Monte Carlo experiment: cells (model configurations) x runs.
struct McPlan {
  std::vector<ModelSpec> cells;
  std::size_t runs = 1000;
  BootstrapConfig boot;          // B, v, alphas; per-run seeds are derived
  SmoothingConfig smoothing;
  std::uint64_t master_seed = 1;
  unsigned jobs = 1;             // worker threads; 0 = hardware concurrency

  void validate() const;
};

/// Aggregated results of one cell.
struct CellResult {
  ModelSpec model;
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::vector<double> alphas;
  std::vector<double> frequencies;  // rejection frequency per alpha, over successful runs
  std::vector<double> std_errors;   // binomial Monte Carlo standard error per alpha
  double mean_c2_hat = 0.0;
};

struct McReport {
  int schema = 1;
  std::uint64_t master_seed = 0;
  std::size_t runs = 0;
  std::size_t replicates_B = 0;
  double smoothing_v = 0.0;
  std::vector<CellResult> cells;
};

/// Observation hook: called once per successful run (under a lock) with the
/// cell index, run index and full outcome.
using RunObserver =
    std::function<void(std::size_t cell, std::size_t run, const TestOutcome&)>;

/// Runs the experiment. Run r of cell ci draws its data and bootstrap seeds
/// from streams derived from (master_seed, ci, r), and aggregation keys
/// results by (ci, r), so the report is byte-identical for any `jobs`.
/// Rejections are aggregated as integer counts; frequencies are formed once
/// at the end. A run that raises a library error counts as a failure; a cell
/// whose failures exceed 1% of runs raises CellFailure.
[[nodiscard]] McReport run_plan(const McPlan& plan, const RunObserver& observer = {});

enum class ReportFormat { text, json, csv };

[[nodiscard]] ReportFormat parse_format(const std::string& name);

/// Renders a report. The JSON form is canonical: parse_report_json followed
/// by emit_report(., json) reproduces the bytes exactly.
[[nodiscard]] std::string emit_report(const McReport& report, ReportFormat format);

[[nodiscard]] McReport parse_report_json(const std::string& text);

}  // namespace cvtest
