#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "energynet/csv.hpp"
#include "energynet/errors.hpp"
#include "energynet/extensions.hpp"
#include "energynet/green.hpp"
#include "energynet/harmonics.hpp"
#include "energynet/kernels.hpp"
#include "energynet/network.hpp"
#include "energynet/network_io.hpp"
#include "energynet/operators.hpp"
#include "energynet/sweeps.hpp"
#include "energynet/truncation.hpp"

namespace energynet::cli {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

namespace detail {

inline Network generate(const std::string& family, double c, int size) {
  if (family == "zgeom") return make_geometric_integers(c, size);
  if (family == "tree") return make_geometric_tree(c, size);
  throw ValidationError("unknown family: " + family + " (expected zgeom or tree)");
}

inline BoundaryMode parse_mode(const std::string& mode) {
  if (mode == "free") return BoundaryMode::Free;
  if (mode == "wired") return BoundaryMode::Wired;
  throw ValidationError("unknown mode: " + mode + " (expected free or wired)");
}

inline VertexId parse_xi(const std::string& spec) {
  const std::string prefix = "delta:";
  if (spec.rfind(prefix, 0) != 0)
    throw ValidationError("vector spec must look like delta:<vertex>, got " + spec);
  return parse_vertex_id(spec.substr(prefix.size()));
}

inline std::pair<int, int> parse_radii(const std::string& spec) {
  auto dots = spec.find("..");
  if (dots == std::string::npos)
    throw ValidationError("radii range must look like A..B, got " + spec);
  try {
    int lo = std::stoi(spec.substr(0, dots));
    int hi = std::stoi(spec.substr(dots + 2));
    return {lo, hi};
  } catch (const std::exception&) {
    throw ValidationError("radii range must look like A..B, got " + spec);
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << text;
}

inline nlohmann::json sweep_report(const std::string& quantity,
                                   const std::vector<SweepRow>& rows, double tol) {
  nlohmann::json report = nlohmann::json::array();
  for (const auto& row : rows) {
    if (!std::isfinite(row.value) || !std::isfinite(row.residual))
      throw NumericalError("sweep produced a non-finite value");
    report.push_back({{"quantity", quantity},
                      {"radius", row.radius},
                      {"value", row.value},
                      {"residual", row.residual},
                      {"tolerance", tol},
                      {"pass", row.residual <= tol}});
  }
  return report;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"discrete potential theory on weighted graphs"};
  app.require_subcommand(1);

  std::string family = "zgeom";
  std::string net_path;
  std::string out_path;
  std::string mode = "wired";
  std::string kernel_mode = "free";
  std::string xi_spec = "delta:0";
  std::string f_spec = "delta:0";
  std::string quantity = "h-energy";
  std::string radii_spec = "5..20";
  std::string in_path;
  double c = 2.0;
  int size = 10;
  int radius = 8;
  int defect_n = 50;
  double f1 = 1.0;
  double tol = 1e-10;
  double null_tol = 1e-12;
  std::uint64_t seed = 42;

  CLI::App* gen = app.add_subcommand("gen", "generate an example network document");
  gen->add_option("--family", family, "zgeom or tree")->capture_default_str();
  gen->add_option("--c", c, "geometric growth rate")->capture_default_str();
  gen->add_option("--size", size, "half-width (zgeom) or depth (tree)")->capture_default_str();
  gen->add_option("--out", out_path, "output network file")->required();

  CLI::App* validate_cmd = app.add_subcommand("validate", "check network invariants");
  validate_cmd->add_option("file", net_path, "network document")->required();
  validate_cmd->add_option("--out", out_path, "write a JSON validation report");

  CLI::App* kernel_cmd = app.add_subcommand("kernel", "energy kernel on a truncation");
  kernel_cmd->add_option("file", net_path)->required();
  kernel_cmd->add_option("--radius", radius)->capture_default_str();
  kernel_cmd->add_option("--mode", kernel_mode)->capture_default_str();
  kernel_cmd->add_option("--out", out_path, "CSV: x,vertex,value")->required();

  CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "spectral measures on a truncation");
  spectrum_cmd->add_option("file", net_path)->required();
  spectrum_cmd->add_option("--radius", radius)->capture_default_str();
  spectrum_cmd->add_option("--mode", mode)->capture_default_str();
  spectrum_cmd->add_option("--xi", xi_spec, "vector, e.g. delta:1")->capture_default_str();
  spectrum_cmd->add_option("--tol", null_tol, "relative cutoff for null modes")
      ->capture_default_str();
  spectrum_cmd->add_option("--out", out_path, "CSV: side,lambda,weight")->required();

  CLI::App* defect_cmd = app.add_subcommand("defect", "defect vector by recurrence");
  defect_cmd->add_option("--family", family)->capture_default_str();
  defect_cmd->add_option("--c", c)->capture_default_str();
  defect_cmd->add_option("--n", defect_n, "range [-n, n]")->capture_default_str();
  defect_cmd->add_option("--f1", f1, "value of f(1), must be nonzero")->capture_default_str();
  defect_cmd->add_option("--out", out_path, "CSV: n,f,partial_energy")->required();

  CLI::App* green_cmd = app.add_subcommand("green", "Green operator on a wired truncation");
  green_cmd->add_option("file", net_path)->required();
  green_cmd->add_option("--radius", radius)->capture_default_str();
  green_cmd->add_option("--mode", mode)->capture_default_str();
  green_cmd->add_option("--f", f_spec, "vector, e.g. delta:0")->capture_default_str();
  green_cmd->add_option("--out", out_path, "CSV: vertex,f,green,harmonic")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "quantity across truncation radii");
  sweep_cmd->add_option("--family", family)->capture_default_str();
  sweep_cmd->add_option("--c", c)->capture_default_str();
  sweep_cmd->add_option("--quantity", quantity, "h-energy, monopole, or green-energy")
      ->capture_default_str();
  sweep_cmd->add_option("--radii", radii_spec, "range A..B")->capture_default_str();
  sweep_cmd->add_option("--seed", seed)->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "CSV: radius,value,residual")->required();

  CLI::App* report_cmd = app.add_subcommand("report", "JSON summary of a sweep CSV");
  report_cmd->add_option("--in", in_path, "sweep CSV")->required();
  report_cmd->add_option("--quantity", quantity)->capture_default_str();
  report_cmd->add_option("--tol", tol)->capture_default_str();
  report_cmd->add_option("--out", out_path, "JSON report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (gen->parsed()) {
      Network net = detail::generate(family, c, size);
      save_network(net, out_path);
      out << "wrote " << out_path << " (" << net.vertex_count() << " vertices, "
          << net.edge_count() << " edges)\n";
      return kExitOk;
    }

    if (validate_cmd->parsed()) {
      Network net = load_network(net_path);
      ValidationReport report = validate(net);
      if (!out_path.empty()) {
        nlohmann::json doc;
        doc["ok"] = report.ok();
        doc["violations"] = nlohmann::json::array();
        for (const auto& v : report.violations) doc["violations"].push_back(v.detail);
        detail::write_text(out_path, doc.dump(2) + "\n");
      }
      if (!report.ok()) {
        err << report.summary();
        return kExitValidation;
      }
      out << net_path << ": ok\n";
      return kExitOk;
    }

    if (kernel_cmd->parsed()) {
      Network net = load_network(net_path);
      Truncation trunc = truncate(net, net.origin(), radius, detail::parse_mode(kernel_mode));
      KernelFamily kernel = KernelFamily::build(trunc);
      CsvWriter csv({"x", "vertex", "value"});
      for (Eigen::Index x = 0; x < trunc.size(); ++x) {
        VertexFunction v = kernel.member(x);
        for (Eigen::Index i = 0; i < trunc.size(); ++i)
          csv.add_row({to_string(trunc.vertex_at(x)), to_string(trunc.vertex_at(i)),
                       format_number(v[i])});
      }
      csv.save(out_path);
      return kExitOk;
    }

    if (spectrum_cmd->parsed()) {
      Network net = load_network(net_path);
      Truncation trunc = truncate(net, net.origin(), radius, detail::parse_mode(mode));
      VertexFunction xi = delta(trunc, trunc.require_index(detail::parse_xi(xi_spec)));
      MeasurePair measures = krein_spectral_measures(trunc, xi, null_tol);
      CsvWriter csv({"side", "lambda", "weight"});
      for (const auto& atom : measures.ell2.atoms)
        csv.add_row({"ell2", format_number(atom.lambda), format_number(atom.weight)});
      for (const auto& atom : measures.krein.atoms)
        csv.add_row({"krein", format_number(atom.lambda), format_number(atom.weight)});
      if (trunc.mode() == BoundaryMode::Wired) {
        MonopoleFamily monopoles = MonopoleFamily::build(trunc);
        SpectralMeasure friedrichs = friedrichs_measure(trunc, monopoles, xi);
        for (const auto& atom : friedrichs.atoms)
          csv.add_row({"friedrichs", format_number(atom.lambda), format_number(atom.weight)});
      }
      csv.save(out_path);
      return kExitOk;
    }

    if (defect_cmd->parsed()) {
      if (family != "zgeom")
        throw ValidationError("defect: only the zgeom family has the recurrence closed form");
      DefectVector defect = defect_vector_Z(c, defect_n, f1);
      CsvWriter csv({"n", "f", "partial_energy"});
      for (std::int64_t n = -defect.n_max; n <= defect.n_max; ++n) {
        double partial =
            n == 0 ? 0.0 : defect.partial_energies[static_cast<std::size_t>(std::llabs(n)) - 1];
        csv.add_row({std::to_string(n), format_number(defect.value(n)), format_number(partial)});
      }
      csv.save(out_path);
      return kExitOk;
    }

    if (green_cmd->parsed()) {
      Network net = load_network(net_path);
      Truncation trunc = truncate(net, net.origin(), radius, detail::parse_mode(mode));
      VertexFunction f = delta(trunc, trunc.require_index(detail::parse_xi(f_spec)));
      VertexFunction g = green_apply(trunc, f);
      CsvWriter csv({"vertex", "f", "green", "harmonic"});
      for (Eigen::Index i = 0; i < trunc.size(); ++i)
        csv.add_row({to_string(trunc.vertex_at(i)), format_number(f[i]), format_number(g[i]),
                     format_number(f[i] + g[i])});
      csv.save(out_path);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      if (family != "zgeom")
        throw ValidationError("sweep: quantities are defined on the zgeom family");
      auto [lo, hi] = detail::parse_radii(radii_spec);
      std::vector<SweepRow> rows = run_sweep(quantity, c, lo, hi);
      CsvWriter csv({"radius", "value", "residual"});
      for (const auto& row : rows)
        csv.add_row({std::to_string(row.radius), format_number(row.value),
                     format_number(row.residual)});
      csv.save(out_path);
      return kExitOk;
    }

    if (report_cmd->parsed()) {
      CsvTable table = read_csv_file(in_path);
      std::vector<SweepRow> rows;
      for (const auto& cells : table.rows) {
        if (cells.size() != 3) throw ValidationError(in_path + ": expected 3 columns per row");
        rows.push_back({std::stoi(cells[0]), std::stod(cells[1]), std::stod(cells[2])});
      }
      nlohmann::json report = detail::sweep_report(quantity, rows, tol);
      detail::write_text(out_path, report.dump(2) + "\n");
      return kExitOk;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace energynet::cli
