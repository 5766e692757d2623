#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "pdasc/bench.hpp"
#include "pdasc/continuation.hpp"

namespace pdasc {

// 17 significant digits: enough to round-trip any 64-bit float exactly.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// One row per continuation step. `selected` flags the chosen step.
inline void write_path_csv(const SolutionPath& path, std::ostream& os) {
  os << "lambda,pdas_iters,active_size,kkt_r1,kkt_r2,residual_norm,bic,selected\n";
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const PathStep& s = path.steps[i];
    const bool chosen = path.selected && *path.selected == static_cast<int>(i);
    os << csv_number(s.lambda) << ',' << s.pdas_iterations << ','
       << s.sets.a_plus.size() + s.sets.a_minus.size() << ',' << csv_number(s.kkt.stationarity)
       << ',' << csv_number(s.kkt.fixed_point) << ',' << csv_number(s.residual_norm) << ','
       << csv_number(s.bic) << ',' << (chosen ? 1 : 0) << '\n';
  }
}

// One row per replication plus a final aggregate row, columns in the
// metrics struct's declared order. A failed replication prints "F" in
// every column. Wall-clock fields print 0 unless timing is requested, so
// repeated runs with one seed are byte-identical.
inline void write_metrics_csv(const ExperimentResult& result, std::ostream& os,
                              bool include_timing = false) {
  os << "time_seconds,l2_re,linf_ae,l2_dre,linf_dae,set_extra,set_missed,lambda_hat,psnr\n";
  const auto row_out = [&](const MetricsRow& row) {
    if (row.failed) {
      os << "F,F,F,F,F,F,F,F,F\n";
      return;
    }
    os << (include_timing ? csv_number(row.time_seconds) : std::string("0")) << ','
       << csv_number(row.l2_re) << ',' << csv_number(row.linf_ae) << ','
       << csv_number(row.l2_dre) << ',' << csv_number(row.linf_dae) << ','
       << csv_number(row.set_extra) << ',' << csv_number(row.set_missed) << ','
       << csv_number(row.lambda_hat) << ',' << csv_number(row.psnr) << '\n';
  };
  for (const MetricsRow& row : result.rows) row_out(row);
  row_out(result.aggregate);
}

// One aggregate row of the rule-comparison table. A cell where most
// replications failed prints "F" across the metric columns.
inline void write_bench_table_row(std::ostream& os, const std::string& setting,
                                  const std::string& method, const ExperimentResult& result,
                                  int replications, bool include_timing) {
  os << setting << ',' << method << ',';
  if (result.failed_count * 2 > replications) {
    os << "F,F,F,F,F\n";
    return;
  }
  const MetricsRow& a = result.aggregate;
  os << (include_timing ? csv_number(a.time_seconds) : std::string("0")) << ','
     << csv_number(a.l2_re) << ',' << csv_number(a.set_extra) << ','
     << csv_number(a.set_missed) << ',' << csv_number(a.lambda_hat) << '\n';
}

inline const char* bench_table_header() {
  return "setting,method,time_seconds,l2_re,set_extra,set_missed,lambda_hat\n";
}

}  // namespace pdasc
