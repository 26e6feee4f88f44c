#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/dyadic.hpp"
#include "bergman/experiments.hpp"
#include "bergman/operators.hpp"
#include "bergman/tents.hpp"
#include "bergman/weights.hpp"

namespace bergman {

using Json = nlohmann::json;

inline constexpr char kKernelMagic[8] = {'B', 'K', 'M', 'A', 'T', '\0', '\0', '\0'};

inline Json point_json(const CPoint& z) {
  Json out = Json::array();
  for (int i = 0; i < z.dim; ++i) out.push_back({z[i].real(), z[i].imag()});
  return out;
}

inline Json index_json(std::size_t i) { return i == kNoIndex ? Json(nullptr) : Json(i); }

inline std::size_t index_from_json(const Json& j) { return j.is_null() ? kNoIndex : j.get<std::size_t>(); }

// ---------------------------------------------------------------------------
// Dyadic and tent systems

inline Json to_json(const DyadicSystem& sys) {
  Json levels = Json::array();
  for (const auto& level : sys.levels) {
    Json cells = Json::array();
    for (const auto& c : level)
      cells.push_back({{"index", c.index},
                       {"ref", c.ref},
                       {"parent", index_json(c.parent)},
                       {"children", c.children},
                       {"members", c.members},
                       {"measure", c.measure}});
    levels.push_back(std::move(cells));
  }
  return {{"scale_ratio", sys.scale_ratio},
          {"top_scale", sys.top_scale},
          {"k_max", sys.k_max},
          {"seed", sys.seed},
          {"levels", std::move(levels)}};
}

/// Inverse of to_json; cell_of is rebuilt from the member lists.
inline DyadicSystem dyadic_from_json(const Json& j, std::size_t boundary_count) {
  DyadicSystem sys;
  sys.scale_ratio = j.at("scale_ratio").get<double>();
  sys.top_scale = j.at("top_scale").get<double>();
  sys.k_max = j.at("k_max").get<int>();
  sys.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& level : j.at("levels")) {
    const int k = static_cast<int>(sys.levels.size());
    std::vector<DyadicCell> cells;
    std::vector<std::size_t> owner(boundary_count, kNoIndex);
    for (const auto& c : level) {
      DyadicCell cell;
      cell.level = k;
      cell.index = c.at("index").get<std::size_t>();
      cell.ref = c.at("ref").get<std::size_t>();
      cell.parent = index_from_json(c.at("parent"));
      cell.children = c.at("children").get<std::vector<std::size_t>>();
      cell.members = c.at("members").get<std::vector<std::size_t>>();
      cell.measure = c.at("measure").get<double>();
      for (std::size_t x : cell.members) {
        if (x >= boundary_count) throw Error(ErrorCode::InvalidArgument, "cell member outside the boundary sample range");
        owner[x] = cell.index;
      }
      cells.push_back(std::move(cell));
    }
    sys.levels.push_back(std::move(cells));
    sys.cell_of.push_back(std::move(owner));
  }
  return sys;
}

inline Json to_json(const TentSystem& ts) {
  Json levels = Json::array();
  for (std::size_t k = 0; k < ts.tents.size(); ++k) {
    Json items = Json::array();
    for (std::size_t j = 0; j < ts.tents[k].size(); ++j) {
      const Tent& t = ts.tents[k][j];
      Json entry = {{"cell", t.cell}, {"members", t.members}, {"volume", t.volume}};
      if (k < ts.kubes.size()) {
        const Kube& q = ts.kubes[k][j];
        entry["kube"] = {{"members", q.members}, {"volume", q.volume}, {"center", point_json(q.center)}};
      }
      items.push_back(std::move(entry));
    }
    levels.push_back(std::move(items));
  }
  return {{"levels", std::move(levels)}, {"residual", ts.residual}, {"residual_volume", ts.residual_volume}};
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const SandwichConstants& c) {
  return {{"inner", c.inner}, {"outer", c.outer}, {"ratio", c.ratio()}};
}

inline Json to_json(const AdjacencyReport& r) {
  return {{"trials", r.trials},
          {"successes", r.successes},
          {"success_rate", r.success_rate()},
          {"threshold", r.threshold},
          {"worst_factor", r.worst_factor},
          {"worst_success_factor", r.worst_success_factor}};
}

inline Json to_json(const TentSandwichReport& r) {
  return {{"trials", r.trials},
          {"successes", r.successes},
          {"success_rate", r.success_rate()},
          {"threshold", r.threshold},
          {"worst_factor", r.worst_factor}};
}

inline Json to_json(const CharacteristicReport& r) {
  return {{"value", r.value},
          {"global_product", r.global_product},
          {"global_term", r.global_term},
          {"tent_sup", r.tent_sup},
          {"tent_term", r.tent_term},
          {"exponent", r.exponent},
          {"witness",
           {{"system", index_json(r.witness.system)},
            {"level", r.witness.level},
            {"cell", index_json(r.witness.cell)}}},
          {"tents_scanned", r.tents_scanned},
          {"tents_skipped", r.tents_skipped}};
}

inline Json to_json(const NormEstimate& e) {
  return {{"p", e.p},
          {"weight", e.weight},
          {"lower_bound", e.lower_bound},
          {"budget", e.budget},
          {"method", e.method},
          {"iterations", e.iterations},
          {"rayleigh", e.rayleigh},
          {"monotone", e.monotone},
          {"best_candidate", e.best_candidate}};
}

inline Json to_json(const SlopeFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}

inline Json to_json(const SweepReport& r) {
  Json rows = Json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"s", x.s},
                    {"p", x.p},
                    {"bracket", x.bracket},
                    {"bp", x.bp},
                    {"norm_lb", x.norm_lb},
                    {"f_norm_p", x.f_norm_p},
                    {"pf_norm", x.pf_norm},
                    {"ratio", x.ratio}});
  return {{"rows", std::move(rows)},
          {"bracket_slope", to_json(r.bracket_slope)},
          {"f_norm_slope", to_json(r.f_norm_slope)},
          {"norm_slope", to_json(r.norm_slope)},
          {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio}};
}

inline Json to_json(const LowerBoundReport& r) {
  return {{"bp", r.bp}, {"lhs", r.lhs}, {"norm_lb", r.norm_lb}, {"constant", r.constant}};
}

inline Json to_json(const DominationReport& r) {
  return {{"pairs", r.pairs},
          {"max_ratio", r.max_ratio},
          {"max_random_ratio", r.max_random_ratio},
          {"max_diagonal_ratio", r.max_diagonal_ratio},
          {"mean_ratio", r.mean_ratio},
          {"worst_pair", {r.worst_i, r.worst_j}}};
}

inline Json to_json(const WeakTypeReport& r) {
  Json rows = Json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"label", x.label}, {"quasi_norm", x.quasi_norm}, {"l1_ratio", x.l1_ratio}});
  return {{"rows", std::move(rows)}, {"bound", r.bound}};
}

// ---------------------------------------------------------------------------
// CSV

/// Columns: index,value
inline std::string weight_csv(const Weight& w) {
  std::ostringstream os;
  os << "index,value\n";
  for (std::size_t i = 0; i < w.values.size(); ++i) os << i << ',' << format_number(w.values[i]) << '\n';
  return os.str();
}

/// Columns: s,p,bracket,bp,norm_lb,f_norm_p,pf_norm,ratio
inline std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "s,p,bracket,bp,norm_lb,f_norm_p,pf_norm,ratio\n";
  for (const auto& x : r.rows)
    os << format_number(x.s) << ',' << format_number(x.p) << ',' << format_number(x.bracket) << ','
       << format_number(x.bp) << ',' << format_number(x.norm_lb) << ',' << format_number(x.f_norm_p) << ','
       << format_number(x.pf_norm) << ',' << format_number(x.ratio) << '\n';
  return os.str();
}

/// Columns: quantity,slope,intercept,residual
inline std::string slope_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "quantity,slope,intercept,residual\n";
  auto row = [&](const char* name, const SlopeFit& f) {
    os << name << ',' << format_number(f.slope) << ',' << format_number(f.intercept) << ','
       << format_number(f.residual) << '\n';
  };
  row("bracket", r.bracket_slope);
  row("f_norm_p", r.f_norm_slope);
  row("norm_lb", r.norm_slope);
  return os.str();
}

// ---------------------------------------------------------------------------
// Files

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write to " + path.string() + " failed");
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

/// Binary layout: 8-byte magic "BKMAT", uint64 rows, uint64 cols, then
/// row-major (re, im) doubles in native byte order.
inline void write_kernel_dump(const std::filesystem::path& path, const KernelMatrix& kernel) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
  const std::uint64_t m = kernel.size();
  out.write(kKernelMagic, sizeof kKernelMagic);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  std::vector<double> row(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const cplx v = kernel.entry(i, j);
      row[2 * j] = v.real();
      row[2 * j + 1] = v.imag();
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::InvalidArgument, "write to " + path.string() + " failed");
}

struct KernelDump {
  std::uint64_t rows = 0, cols = 0;
  std::vector<cplx> entries;
};

inline KernelDump read_kernel_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  char magic[8];
  KernelDump d;
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kKernelMagic, sizeof magic) != 0)
    throw Error(ErrorCode::InvalidArgument, path.string() + " is not a kernel dump");
  in.read(reinterpret_cast<char*>(&d.rows), sizeof d.rows);
  in.read(reinterpret_cast<char*>(&d.cols), sizeof d.cols);
  std::vector<double> raw(2 * d.rows * d.cols);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::InvalidArgument, path.string() + " is truncated");
  d.entries.resize(d.rows * d.cols);
  for (std::size_t k = 0; k < d.entries.size(); ++k) d.entries[k] = cplx(raw[2 * k], raw[2 * k + 1]);
  return d;
}

}  // namespace bergman
