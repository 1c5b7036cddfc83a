#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kwgraph/driver.hpp"
#include "kwgraph/errors.hpp"

namespace kwg {

namespace detail {

// %.17g round-trips doubles and stays locale independent.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
  return os;
}

inline void finish(std::ofstream& os, const std::filesystem::path& p) {
  os.flush();
  if (!os) throw std::runtime_error("write to '" + p.string() + "' failed");
}

}  // namespace detail

inline std::string result_to_string(const SolveResult& r) { return nlohmann::json(r).dump(2) + "\n"; }

inline SolveResult result_from_string(const std::string& s) { return nlohmann::json::parse(s).get<SolveResult>(); }

inline void write_trace_csv(const std::filesystem::path& p, const std::vector<TraceRow>& rows) {
  auto os = detail::open_for_write(p);
  os << "t,dt,J_k,residual,min_f,max_f\n";
  for (const auto& r : rows)
    os << detail::fmt(r.t) << ',' << detail::fmt(r.dt) << ',' << detail::fmt(r.energy) << ','
       << detail::fmt(r.residual) << ',' << detail::fmt(r.min_f) << ',' << detail::fmt(r.max_f) << '\n';
  detail::finish(os, p);
}

// Long format: one row per (level, probe); residual repeats per probe.
inline void write_plot_csv(const std::filesystem::path& p, const SolveResult& r) {
  auto os = detail::open_for_write(p);
  os << "k,probe,value,in_level,residual\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& lv = r.levels[i];
    if (r.limit.per_probe.empty()) os << lv.k << ",,,," << detail::fmt(lv.residual) << '\n';
    for (const auto& s : r.limit.per_probe)
      os << lv.k << ',' << s.probe << ',' << detail::fmt(s.values[i]) << ',' << (s.in_level[i] ? 1 : 0) << ','
         << detail::fmt(lv.residual) << '\n';
  }
  detail::finish(os, p);
}

// result.json, plot_data.csv and, if traced, traces/level_<k>.csv under dir.
inline void emit_reports(const SolveOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    const auto p = dir / "result.json";
    auto os = detail::open_for_write(p);
    os << result_to_string(out.result);
    detail::finish(os, p);
  }
  write_plot_csv(dir / "plot_data.csv", out.result);
  bool any = false;
  for (const auto& t : out.traces) any = any || !t.empty();
  if (!any) return;
  std::filesystem::create_directories(dir / "traces");
  for (std::size_t i = 0; i < out.traces.size(); ++i)
    write_trace_csv(dir / "traces" / ("level_" + std::to_string(out.result.levels[i].k) + ".csv"), out.traces[i]);
}

}  // namespace kwg
