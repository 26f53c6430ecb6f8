#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "passtopic/error.hpp"
#include "passtopic/match_data.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/model_io.hpp"
#include "passtopic/pattern_engine.hpp"
#include "passtopic/pitch_metrics.hpp"
#include "passtopic/report.hpp"
#include "passtopic/seqmine.hpp"

namespace py = pybind11;
using namespace passtopic;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

// A match normalized for one team and segmented.
struct PyMatch {
  MatchRecord view;
  TeamId team;
};

PyMatch load_match(const std::string& text, std::optional<std::string> team, bool heuristic_styles) {
  MatchRecord raw = parse_match(text);
  TeamId t = team.value_or(raw.teams[0].id);
  raw.team(t);
  PyMatch m{normalize_direction(std::move(raw), t), t};
  segment(m.view, SegmentOptions{heuristic_styles});
  return m;
}

py::object phases_of(const PyMatch& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : m.view.phases) {
    out.push_back({{"id", p.id},
                   {"team", p.team},
                   {"half", p.half},
                   {"passes", p.passes.size()},
                   {"style", to_string(p.style)},
                   {"end_event", event_to_json(p.end_event)}});
  }
  return to_python(out);
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw Error(ErrorCode::invalid_argument, "ragged matrix", "X");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.emplace_back(m.row(r).begin(), m.row(r).end());
  return rows;
}

std::vector<Position> to_positions(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Position> out;
  out.reserve(pts.size());
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return out;
}

std::vector<std::pair<std::vector<int>, int>> to_pairs(const std::vector<SequentialPattern>& patterns) {
  std::vector<std::pair<std::vector<int>, int>> out;
  for (const auto& p : patterns) out.emplace_back(p.tokens, p.support);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Passing-pattern analytics core";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<PyMatch>(m, "Match")
      .def_property_readonly("match_id", [](const PyMatch& pm) { return pm.view.match_id; })
      .def_property_readonly("team", [](const PyMatch& pm) { return pm.team; })
      .def_property_readonly("teams",
                             [](const PyMatch& pm) {
                               return std::vector<std::string>{pm.view.teams[0].id, pm.view.teams[1].id};
                             })
      .def_property_readonly("phases", &phases_of)
      .def("to_json", [](const PyMatch& pm) { return match_to_json(pm.view).dump(); });

  m.def("load_match", &load_match, py::arg("text"), py::arg("team") = py::none(),
        py::arg("heuristic_styles") = false,
        "Parse a match document, normalize it for `team`, and segment it into phases.");

  m.def(
      "detect_patterns",
      [](const PyMatch& pm, int k, std::uint64_t seed, int max_iters, double tol, const std::string& mode,
         const std::string& words, double theta) {
        DetectConfig cfg;
        cfg.nmf.seed = seed;
        cfg.nmf.max_iters = max_iters;
        cfg.nmf.tol = tol;
        cfg.theta = theta;
        auto cm = parse_count_mode(mode);
        auto wm = parse_word_mode(words);
        if (!cm || !wm) throw Error(ErrorCode::invalid_argument, "unknown mode", "mode");
        cfg.count_mode = *cm;
        cfg.word_mode = *wm;
        return to_python(detection_to_json(detect_patterns(pm.view, pm.team, k, cfg)));
      },
      py::arg("match"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 500, py::arg("tol") = 1e-6,
      py::arg("mode") = "binary", py::arg("words") = "player", py::arg("theta") = kDefaultKeyThreshold,
      "Fit build-up patterns plus the counter-attack aggregate; returns the model export as a dict.");

  m.def(
      "nmf_fit",
      [](const std::vector<std::vector<double>>& X, int k, std::uint64_t seed, int max_iters, double tol) {
        Corpus corpus;
        corpus.X = to_matrix(X);
        for (std::size_t j = 0; j < corpus.X.cols(); ++j) corpus.phase_ids.push_back(static_cast<int>(j));
        PatternModel model = nmf_fit(corpus, k, {max_iters, tol, seed, std::nullopt});
        std::vector<int> assignments;
        for (const auto& a : model.assignments) assignments.push_back(a.pattern_id);
        py::dict out;
        out["W"] = from_matrix(model.W);
        out["H"] = from_matrix(model.H);
        out["objective_trace"] = model.objective_trace;
        out["converged"] = model.converged;
        out["assignments"] = assignments;
        return out;
      },
      py::arg("X"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 500, py::arg("tol") = 1e-6);

  m.def(
      "prefixspan",
      [](const std::vector<std::vector<int>>& seqs, int min_support, int max_len) {
        return to_pairs(prefixspan(seqs, min_support, max_len));
      },
      py::arg("sequences"), py::arg("min_support"), py::arg("max_len"));
  m.def(
      "brute_force_mine",
      [](const std::vector<std::vector<int>>& seqs, int min_support, int max_len) {
        return to_pairs(brute_force_mine(seqs, min_support, max_len));
      },
      py::arg("sequences"), py::arg("min_support"), py::arg("max_len"));

  m.def(
      "covered_area", [](const std::vector<std::pair<double, double>>& pts) { return covered_area(to_positions(pts)); },
      py::arg("points"));
  m.def(
      "pressure",
      [](std::pair<double, double> carrier, std::pair<double, double> attack_dir,
         const std::vector<std::pair<double, double>>& defenders, double d_front, double d_back, double exponent) {
        return pressure({carrier.first, carrier.second}, {attack_dir.first, attack_dir.second}, to_positions(defenders),
                        {d_front, d_back, exponent});
      },
      py::arg("carrier"), py::arg("attack_dir"), py::arg("defenders"), py::arg("d_front") = 9.0,
      py::arg("d_back") = 3.0, py::arg("exponent") = 1.0);
  m.def(
      "spatial_region",
      [](double x, double y) {
        auto r = spatial_region({x, y});
        return std::make_pair(r.row, r.col);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "formation_line_count", [](const std::string& f) { return formation_lines(f).line_count(); },
      py::arg("formation"));
}
