#include "cvtest/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

using nlohmann::json;

// Stream-derivation tags: one branch for the data draw, one for the
// bootstrap seeds of the same run.
constexpr std::uint64_t kGenerateTag = 0xDA;
constexpr std::uint64_t kBootstrapTag = 0xB5;

// A cell aborts when failures exceed this share of its runs.
constexpr double kFailureBudget = 0.01;

json cell_to_json(const CellResult& cell) {
  json j;
  j["model"] = model_name(cell.model.id);
  j["c"] = cell.model.c;
  j["theta0"] = cell.model.theta0;
  j["theta1"] = cell.model.theta1;
  j["n"] = cell.model.n;
  j["burn_in"] = cell.model.burn_in;
  j["runs"] = cell.runs;
  j["failures"] = cell.failures;
  j["alphas"] = cell.alphas;
  j["frequencies"] = cell.frequencies;
  j["std_errors"] = cell.std_errors;
  j["mean_c2_hat"] = cell.mean_c2_hat;
  return j;
}

CellResult cell_from_json(const json& j) {
  CellResult cell;
  cell.model.id = parse_model(j.at("model").get<std::string>());
  cell.model.c = j.at("c").get<double>();
  cell.model.theta0 = j.at("theta0").get<double>();
  cell.model.theta1 = j.at("theta1").get<double>();
  cell.model.n = j.at("n").get<std::size_t>();
  cell.model.burn_in = j.at("burn_in").get<std::size_t>();
  cell.runs = j.at("runs").get<std::size_t>();
  cell.failures = j.at("failures").get<std::size_t>();
  cell.alphas = j.at("alphas").get<std::vector<double>>();
  cell.frequencies = j.at("frequencies").get<std::vector<double>>();
  cell.std_errors = j.at("std_errors").get<std::vector<double>>();
  cell.mean_c2_hat = j.at("mean_c2_hat").get<double>();
  return cell;
}

std::string cell_label(const ModelSpec& model) {
  char buf[64];
  if (model.id == ModelId::s6 || model.id == ModelId::s7 || model.id == ModelId::s8) {
    std::snprintf(buf, sizeof(buf), "%s c=%.2f", model_name(model.id).c_str(), model.c);
  } else if (model.id == ModelId::arch1) {
    std::snprintf(buf, sizeof(buf), "%s (%.2f,%.2f)", model_name(model.id).c_str(),
                  model.theta0, model.theta1);
  } else {
    std::snprintf(buf, sizeof(buf), "%s", model_name(model.id).c_str());
  }
  return buf;
}

}  // namespace

void McPlan::validate() const {
  if (cells.empty()) throw InputError("experiment plan has no cells");
  if (runs < 1) throw InputError("experiment plan needs at least one run");
  boot.validate();
  for (const ModelSpec& cell : cells) cell.validate();
}

McReport run_plan(const McPlan& plan, const RunObserver& observer) {
  plan.validate();

  const std::size_t n_cells = plan.cells.size();
  const std::size_t runs = plan.runs;
  const std::size_t n_alphas = plan.boot.alphas.size();
  const std::size_t total = n_cells * runs;

  // Per-(cell, run) result slots; writing by index keeps aggregation
  // independent of which thread computed what.
  std::vector<std::uint8_t> failed(total, 0);
  std::vector<double> c2_values(total, 0.0);
  std::vector<std::uint8_t> rejected(total * n_alphas, 0);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex state_mutex;  // guards observer and first_error
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed);
      if (idx >= total || abort.load(std::memory_order_relaxed)) return;
      const std::size_t cell = idx / runs;
      const std::size_t run = idx % runs;
      try {
        const std::uint64_t run_seed =
            rng::derive_seed(plan.master_seed, {cell, run});
        rng::Stream gen_stream(rng::derive_seed(run_seed, {kGenerateTag}));
        const Generated data = generate(plan.cells[cell], gen_stream);

        BootstrapConfig cfg = plan.boot;
        cfg.seed = rng::derive_seed(run_seed, {kBootstrapTag});
        const TestOutcome outcome = bootstrap_test(data.sample, cfg, plan.smoothing);

        c2_values[idx] = outcome.c2_hat;
        for (std::size_t a = 0; a < n_alphas; ++a) {
          rejected[idx * n_alphas + a] = outcome.rejections[a].second ? 1 : 0;
        }
        if (observer) {
          const std::lock_guard<std::mutex> lock(state_mutex);
          observer(cell, run, outcome);
        }
      } catch (const Error&) {
        failed[idx] = 1;  // counted against the cell's failure budget
      } catch (...) {
        const std::lock_guard<std::mutex> lock(state_mutex);
        if (!first_error) first_error = std::current_exception();
        abort.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  unsigned jobs = plan.jobs != 0 ? plan.jobs : std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  jobs = static_cast<unsigned>(
      std::min<std::size_t>(jobs, total));

  std::vector<std::thread> pool;
  pool.reserve(jobs - 1);
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);

  // Aggregation: integer rejection counts per alpha, sums in run order.
  McReport report;
  report.schema = 1;
  report.master_seed = plan.master_seed;
  report.runs = runs;
  report.replicates_B = plan.boot.replicates_B;
  report.smoothing_v = plan.boot.smoothing_v;
  report.cells.reserve(n_cells);

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    CellResult result;
    result.model = plan.cells[cell];
    result.runs = runs;
    result.alphas = plan.boot.alphas;

    std::vector<std::size_t> counts(n_alphas, 0);
    double c2_sum = 0.0;
    std::size_t failures = 0;
    for (std::size_t run = 0; run < runs; ++run) {
      const std::size_t idx = cell * runs + run;
      if (failed[idx]) {
        ++failures;
        continue;
      }
      c2_sum += c2_values[idx];
      for (std::size_t a = 0; a < n_alphas; ++a) {
        counts[a] += rejected[idx * n_alphas + a];
      }
    }
    result.failures = failures;
    if (static_cast<double>(failures) >
        kFailureBudget * static_cast<double>(runs)) {
      throw CellFailure("cell " + cell_label(result.model) + ": " +
                        std::to_string(failures) + " of " + std::to_string(runs) +
                        " runs failed (budget 1%)");
    }
    const auto successes = static_cast<double>(runs - failures);
    result.mean_c2_hat = c2_sum / successes;
    result.frequencies.resize(n_alphas);
    result.std_errors.resize(n_alphas);
    for (std::size_t a = 0; a < n_alphas; ++a) {
      const double f = static_cast<double>(counts[a]) / successes;
      result.frequencies[a] = f;
      result.std_errors[a] = std::sqrt(f * (1.0 - f) / successes);
    }
    report.cells.push_back(std::move(result));
  }
  return report;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "text") return ReportFormat::text;
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw InputError("unknown format '" + name + "' (expected text, json or csv)");
}

std::string emit_report(const McReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    json j;
    j["schema"] = report.schema;
    j["master_seed"] = report.master_seed;
    j["runs"] = report.runs;
    j["replicates_B"] = report.replicates_B;
    j["smoothing_v"] = report.smoothing_v;
    json cells = json::array();
    for (const CellResult& cell : report.cells) cells.push_back(cell_to_json(cell));
    j["cells"] = cells;
    return j.dump(2) + "\n";
  }

  if (format == ReportFormat::csv) {
    std::ostringstream out;
    out << "model,c,theta0,theta1,n,burn_in,runs,failures,mean_c2_hat,alpha,"
           "frequency,std_error\n";
    char buf[256];
    for (const CellResult& cell : report.cells) {
      for (std::size_t a = 0; a < cell.alphas.size(); ++a) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%.17g,%.17g,%.17g,%zu,%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g\n",
                      model_name(cell.model.id).c_str(), cell.model.c,
                      cell.model.theta0, cell.model.theta1, cell.model.n,
                      cell.model.burn_in, cell.runs, cell.failures,
                      cell.mean_c2_hat, cell.alphas[a], cell.frequencies[a],
                      cell.std_errors[a]);
        out << buf;
      }
    }
    return out.str();
  }

  // Text table mirroring the simulation-study layout: one row per cell,
  // one rejection-frequency column per level.
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-16s %6s %6s %5s %9s", "model", "n", "runs",
                "fail", "mean_c2");
  out << buf;
  const std::vector<double>& alphas =
      report.cells.empty() ? std::vector<double>{} : report.cells.front().alphas;
  for (double a : alphas) {
    std::snprintf(buf, sizeof(buf), "  a=%-6.3f", a);
    out << buf;
  }
  out << '\n';
  for (const CellResult& cell : report.cells) {
    std::snprintf(buf, sizeof(buf), "%-16s %6zu %6zu %5zu %9.3f",
                  cell_label(cell.model).c_str(), cell.model.n, cell.runs,
                  cell.failures, cell.mean_c2_hat);
    out << buf;
    for (double f : cell.frequencies) {
      std::snprintf(buf, sizeof(buf), "  %8.3f", f);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

McReport parse_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    McReport report;
    report.schema = j.at("schema").get<int>();
    report.master_seed = j.at("master_seed").get<std::uint64_t>();
    report.runs = j.at("runs").get<std::size_t>();
    report.replicates_B = j.at("replicates_B").get<std::size_t>();
    report.smoothing_v = j.at("smoothing_v").get<double>();
    for (const json& cell : j.at("cells")) {
      report.cells.push_back(cell_from_json(cell));
    }
    return report;
  } catch (const json::exception& e) {
    throw InputError(std::string("report JSON has unexpected shape: ") + e.what());
  }
}

}  // namespace cvtest
