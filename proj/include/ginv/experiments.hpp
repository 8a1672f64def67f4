#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <ginv/frobenius.hpp>
#include <ginv/matrixlab.hpp>

namespace ginv {

// Monte-Carlo sweep over (c, p) cells: each replication samples a data set,
// builds both generalized inverses and records their Frobenius functionals
// next to the asymptotic values at c_eff = p/n.

struct SweepConfig {
    std::vector<double> c_list;
    std::vector<Index> p_grid;  // ascending
    int replications = 100;
    SpectrumSpec spectrum = SpectrumSpec::identity();
    NoiseKind noise = NoiseKind::gaussian;
    std::uint64_t master_seed = 42;
    std::string output_path;
    int threads = 0;  // 0: hardware concurrency
};

struct ResultRow {
    double c_target = 0.0;
    double c_eff = 0.0;
    Index p = 0;
    Index n = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double fro_plus_emp = 0.0;
    double fro_minus_emp = 0.0;
    double nfl_emp = 0.0;
    double nfl_asym = 0.0;
    double trace_minus_emp = 0.0;
    double precision_estimate = 0.0;
    bool ok = false;  // false: replication failed even after the one retry
};

struct CellSummary {
    double c_target = 0.0;
    Index p = 0;
    double mean_nfl = 0.0;
    double sd_nfl = 0.0;
    double nfl_asym = 0.0;
    int n_ok = 0;
    int n_failed = 0;
};

struct SweepResult {
    std::vector<ResultRow> rows;        // ordered by (c, p, replicate); failures excluded
    std::vector<CellSummary> summary;   // one per (c, p) cell
};

// One replication.  Deterministic in the scenario; a singular-Gram failure is
// retried once with a seed derived from the scenario seed, then reported as a
// failed row.
ResultRow run_replication(const Scenario& scenario, int replicate = 0);

// Full sweep.  Work items run on a thread pool; each writes its own slot, so
// the result is independent of scheduling.  Writes the row CSV to
// config.output_path (when set) and the per-cell summary CSV alongside it.
SweepResult run_sweep(const SweepConfig& config);

// The shipped simulation preset: spectrum 0.2:1,0.4:3,0.4:10,
// c in {1.07, 2, 10}, p = 50..500 step 50, 100 gaussian replications.
SweepConfig figure1_preset();

// CSV persistence (atomic: temp file + rename).  Floats carry 17 significant
// digits so replay comparisons can be bytewise.
void write_rows_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_summary_csv(const std::filesystem::path& path, const std::vector<CellSummary>& cells);

// r.csv -> r.summary.csv
std::filesystem::path summary_path_for(const std::filesystem::path& rows_path);

}  // namespace ginv
