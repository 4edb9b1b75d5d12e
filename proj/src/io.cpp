#include "rigidnet/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "rigidnet/errors.hpp"

namespace rigidnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Location {
    std::size_t line = 0, column = 0;
    std::string text;
};

Location locate(const std::string& text, std::size_t offset) {
    Location loc{1, 1, {}};
    // errors at end of input point just past the last visible character
    const std::size_t last = text.find_last_not_of(" \t\r\n");
    offset = std::min(offset, last == std::string::npos ? 0 : last + 1);
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++loc.line;
            line_start = i + 1;
        }
    }
    loc.column = offset - line_start + 1;
    const std::size_t line_end = text.find('\n', line_start);
    loc.text = text.substr(line_start, line_end == std::string::npos ? std::string::npos : line_end - line_start);
    return loc;
}

std::string render(const std::string& source, const Location& loc, const std::string& message) {
    std::ostringstream os;
    os << source << ":" << loc.line << ":" << loc.column << ": " << message << "\n  " << loc.text << "\n  "
       << std::string(loc.column > 0 ? loc.column - 1 : 0, ' ') << "^";
    return os.str();
}

// Field access with JSON-path diagnostics; the line is found by looking up
// the last key of the path in the source text.
class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& message) const {
        std::string key = path;
        if (const auto dot = key.find_last_of('.'); dot != std::string::npos) key = key.substr(dot + 1);
        if (const auto br = key.find('['); br != std::string::npos) key = key.substr(0, br);
        const auto pos = text_.find("\"" + key + "\"");
        if (pos != std::string::npos)
            throw Error(ErrorCode::MalformedDocument, render(source_, locate(text_, pos), path + ": " + message));
        throw Error(ErrorCode::MalformedDocument, source_ + ": " + path + ": " + message);
    }

    const Json& require(const Json& obj, const std::string& key, const std::string& path) const {
        if (!obj.is_object()) fail(path, "expected an object");
        const auto it = obj.find(key);
        if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing field");
        return *it;
    }

    double number(const Json& j, const std::string& path) const {
        if (!j.is_number()) fail(path, "expected a number");
        return j.get<double>();
    }

    // null stands for the given infinity (open side of a cell).
    double bound(const Json& j, const std::string& path, double infinity) const {
        if (j.is_null()) return infinity;
        if (j.is_string()) {
            const auto s = j.get<std::string>();
            if (s == "-inf") return -kInf;
            if (s == "inf" || s == "+inf") return kInf;
        }
        return number(j, path);
    }

    std::int64_t integer(const Json& j, const std::string& path) const {
        if (!j.is_number_integer()) fail(path, "expected an integer");
        return j.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const Json& j, const std::string& path) const {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
        fail(path, "expected a nonnegative integer");
    }

    std::string string(const Json& j, const std::string& path) const {
        if (!j.is_string()) fail(path, "expected a string");
        return j.get<std::string>();
    }

    Vector vector(const Json& j, const std::string& path, double lo_inf = 0.0, double hi_inf = 0.0,
                  bool bounds = false) const {
        if (!j.is_array()) fail(path, "expected an array");
        Vector v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) {
            const std::string p = path + "[" + std::to_string(i) + "]";
            v(static_cast<Eigen::Index>(i)) = bounds ? bound(j[i], p, lo_inf != 0.0 ? lo_inf : hi_inf) : number(j[i], p);
        }
        return v;
    }

    Matrix matrix(const Json& j, const std::string& path) const {
        if (!j.is_array()) fail(path, "expected an array of rows");
        const std::size_t rows = j.size();
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
        for (std::size_t r = 0; r < rows; ++r) {
            const std::string p = path + "[" + std::to_string(r) + "]";
            const Vector row = vector(j[r], p);
            if (static_cast<std::size_t>(row.size()) != rows) fail(p, "row length differs from the number of rows");
            m.row(static_cast<Eigen::Index>(r)) = row.transpose();
        }
        return m;
    }

private:
    const std::string& text_;
    std::string source_;
};

ShockKind parse_shock(const Reader& rd, const Json& j, int n) {
    const std::string kind = rd.string(rd.require(j, "kind", "shock"), "shock.kind");
    if (kind == "single_node_exponential") {
        const auto sector = rd.integer(rd.require(j, "sector", "shock"), "shock.sector");
        if (sector < 1 || sector > n) rd.fail("shock.sector", "must lie in 1.." + std::to_string(n));
        return SingleNodeExponential{static_cast<int>(sector - 1),
                                     rd.number(rd.require(j, "lambda", "shock"), "shock.lambda")};
    }
    if (kind == "independent_exponential")
        return IndependentExponential{rd.vector(rd.require(j, "lambda", "shock"), "shock.lambda")};
    if (kind == "discrete") {
        const Json& support = rd.require(j, "support", "shock");
        if (!support.is_array()) rd.fail("shock.support", "expected an array");
        DiscreteShock d;
        for (std::size_t i = 0; i < support.size(); ++i) {
            const std::string p = "shock.support[" + std::to_string(i) + "]";
            d.support.push_back({rd.vector(rd.require(support[i], "eta", p), p + ".eta"),
                                 rd.number(rd.require(support[i], "prob", p), p + ".prob")});
        }
        return d;
    }
    if (kind == "degenerate") return DegenerateShock{rd.vector(rd.require(j, "eta", "shock"), "shock.eta")};
    rd.fail("shock.kind", "unknown kind '" + kind + "'");
}

SignalKind parse_signal(const Reader& rd, const Json& j) {
    const std::string kind = rd.string(rd.require(j, "kind", "signal"), "signal.kind");
    if (kind == "none") return NoSignal{};
    if (kind == "full") return FullSignal{};
    if (kind == "partition") {
        const Json& cells = rd.require(j, "cells", "signal");
        if (!cells.is_array()) rd.fail("signal.cells", "expected an array");
        PartitionSignal part;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string p = "signal.cells[" + std::to_string(i) + "]";
            part.cells.push_back({rd.vector(rd.require(cells[i], "lower", p), p + ".lower", -kInf, 0.0, true),
                                  rd.vector(rd.require(cells[i], "upper", p), p + ".upper", 0.0, kInf, true)});
        }
        return part;
    }
    rd.fail("signal.kind", "unknown kind '" + kind + "'");
}

Json bound_json(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

}  // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Document parse_document(const std::string& text, const std::string& source) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::string msg = e.what();
        if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw Error(ErrorCode::MalformedDocument, render(source, locate(text, byte), msg));
    }
    const Reader rd(text, source);
    if (!root.is_object()) rd.fail("", "document must be a JSON object");

    Document doc;
    if (root.contains("label")) doc.economy.label = rd.string(root["label"], "label");
    doc.economy.gamma = rd.vector(rd.require(root, "gamma", ""), "gamma");
    const int n = static_cast<int>(doc.economy.gamma.size());
    if (root.contains("n")) {
        const auto declared = rd.integer(root["n"], "n");
        if (declared != n) rd.fail("n", "declares " + std::to_string(declared) + " sectors but gamma has " +
                                            std::to_string(n));
    }
    doc.economy.A = rd.matrix(rd.require(root, "A", ""), "A");
    const Json& theta = rd.require(root, "theta", "");
    doc.economy.theta = theta.is_number() ? Vector::Constant(n, theta.get<double>()) : rd.vector(theta, "theta");
    if (root.contains("beta")) doc.economy.beta = rd.vector(root["beta"], "beta");
    if (root.contains("shock")) doc.shock = parse_shock(rd, root["shock"], n);
    if (root.contains("signal")) doc.signal = parse_signal(rd, root["signal"]);
    if (root.contains("engine")) {
        const Json& e = root["engine"];
        if (!e.is_object()) rd.fail("engine", "expected an object");
        if (e.contains("backend")) {
            try {
                doc.engine.backend = backend_from_string(rd.string(e["backend"], "engine.backend"));
            } catch (const Error& err) {
                rd.fail("engine.backend", err.what());
            }
        }
        if (e.contains("num_draws")) doc.engine.num_draws = rd.unsigned_integer(e["num_draws"], "engine.num_draws");
        if (e.contains("seed")) doc.engine.seed = rd.unsigned_integer(e["seed"], "engine.seed");
    }
    return doc;
}

Document read_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str(), path.string());
}

Problem validate_document(const Document& doc) {
    Economy econ = Economy::validate(doc.economy);
    std::optional<ShockModel> shock;
    std::vector<std::string> warnings;
    if (doc.shock) {
        shock = ShockModel::validate(*doc.shock, econ.n());
        warnings = shock->warnings();
    }
    SignalModel signal = SignalModel::none();
    if (!std::holds_alternative<NoSignal>(doc.signal)) {
        if (!shock) throw Error(ErrorCode::InvalidModel, "a signal needs a shock model");
        signal = SignalModel::validate(doc.signal, *shock);
    }
    return Problem{std::move(econ), std::move(shock), std::move(signal), doc.engine, std::move(warnings)};
}

Json to_json(const Vector& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(std::isfinite(v(i)) ? Json(v(i)) : Json(nullptr));
    return j;
}

Json to_json(const Matrix& m) {
    Json j = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vector(m.row(r).transpose())));
    return j;
}

Json to_json(const Document& doc) {
    Json j;
    const EconomySpec& e = doc.economy;
    if (!e.label.empty()) j["label"] = e.label;
    j["n"] = e.gamma.size();
    j["A"] = to_json(e.A);
    j["gamma"] = to_json(e.gamma);
    j["theta"] = to_json(e.theta);
    if (e.beta) j["beta"] = to_json(*e.beta);
    if (doc.shock) {
        j["shock"] = std::visit(
            [](const auto& s) -> Json {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, SingleNodeExponential>) {
                    return {{"kind", "single_node_exponential"}, {"sector", s.sector + 1}, {"lambda", s.lambda}};
                } else if constexpr (std::is_same_v<T, IndependentExponential>) {
                    return {{"kind", "independent_exponential"}, {"lambda", to_json(s.lambda)}};
                } else if constexpr (std::is_same_v<T, DiscreteShock>) {
                    Json support = Json::array();
                    for (const ShockAtom& a : s.support) support.push_back({{"eta", to_json(a.eta)}, {"prob", a.prob}});
                    return {{"kind", "discrete"}, {"support", support}};
                } else {
                    return {{"kind", "degenerate"}, {"eta", to_json(s.eta)}};
                }
            },
            *doc.shock);
    }
    if (std::holds_alternative<NoSignal>(doc.signal)) {
        j["signal"] = {{"kind", "none"}};
    } else if (std::holds_alternative<FullSignal>(doc.signal)) {
        j["signal"] = {{"kind", "full"}};
    } else {
        Json cells = Json::array();
        for (const Box& b : std::get<PartitionSignal>(doc.signal).cells) {
            Json lo = Json::array(), hi = Json::array();
            for (Eigen::Index k = 0; k < b.lower.size(); ++k) {
                lo.push_back(bound_json(b.lower(k)));
                hi.push_back(bound_json(b.upper(k)));
            }
            cells.push_back({{"lower", lo}, {"upper", hi}});
        }
        j["signal"] = {{"kind", "partition"}, {"cells", cells}};
    }
    j["engine"] = {{"backend", to_string(doc.engine.backend)},
                   {"num_draws", doc.engine.num_draws},
                   {"seed", doc.engine.seed}};
    return j;
}

std::string canonical_text(const Document& doc) { return to_json(doc).dump(2) + "\n"; }

Json to_json(const Solution& s) {
    Json j;
    j["n"] = s.econ.n();
    if (!s.econ.label().empty()) j["label"] = s.econ.label();
    j["theta"] = to_json(s.econ.theta());
    j["beta"] = to_json(s.econ.beta());
    j["L"] = to_json(s.leo.L);
    j["v0"] = to_json(s.leo.v0);
    j["zeta"] = to_json(s.profile.zeta);
    j["xi"] = to_json(s.profile.xi);
    j["L_zeta"] = to_json(s.profile.L_zeta);
    j["psi"] = s.profile.psi;
    j["v_zeta"] = to_json(s.profile.v_zeta);
    j["r"] = to_json(s.profile.r);
    j["y0"] = to_json(s.equil.y0);
    j["z0"] = to_json(s.equil.z0);
    j["l"] = to_json(s.equil.l);
    j["c0"] = to_json(s.equil.c0);
    j["p_over_w"] = to_json(s.equil.p_over_w);
    j["p_rel"] = to_json(s.equil.p_rel);
    j["wage"] = s.equil.wage;
    j["wage_identity"] = s.equil.wage_identity;
    j["expected_exp_rho"] = to_json(s.equil.expected_exp_rho);
    j["welfare_slack"] = std::log(s.profile.psi) + s.leo.v0.dot(s.profile.zeta);
    return j;
}

Json to_json(const SimulationReport& r) {
    Json j;
    j["num_draws"] = r.num_draws;
    j["seed"] = r.seed;
    j["bins"] = r.bins;
    j["profit_mean"] = to_json(r.profit_mean);
    j["profit_mean_se"] = to_json(r.profit_mean_se);
    j["profit_sd"] = to_json(r.profit_sd);
    j["profit_sd_se"] = to_json(r.profit_sd_se);
    j["default_prob"] = to_json(r.default_prob);
    j["default_prob_se"] = to_json(r.default_prob_se);
    j["tau_mean"] = to_json(r.tau_mean);
    j["tau_mean_se"] = to_json(r.tau_mean_se);
    j["eps_mean"] = to_json(r.eps_mean);
    j["eps_mean_se"] = to_json(r.eps_mean_se);
    j["welfare_mean"] = r.welfare_mean;
    j["welfare_mean_se"] = r.welfare_mean_se;
    j["welfare_bound_violations"] = r.welfare_bound_violations;
    const int n = static_cast<int>(r.default_prob.size());
    Json cascades = Json::object();
    for (const auto& [mask, p] : r.cascade_prob) cascades[cascade_label(mask, n)] = p;
    j["cascade_prob"] = cascades;
    j["zeta"] = to_json(r.zeta);
    j["xi"] = to_json(r.xi);
    j["y0"] = to_json(r.y0);
    j["c0"] = to_json(r.c0);
    Json hist = Json::array();
    for (const SectorHistograms& h : r.histograms) {
        const auto one = [](const Histogram& x) { return Json{{"edges", x.edges}, {"counts", x.counts}}; };
        hist.push_back({{"tau", one(h.tau)}, {"epsilon", one(h.epsilon)}, {"profit", one(h.profit)}});
    }
    j["histograms"] = hist;
    return j;
}

Json to_json(const DefaultClassification& c) {
    Json j;
    j["shocked_sector"] = c.o + 1;
    j["eta_o"] = c.eta_o;
    j["t_bar"] = std::isinf(c.t_bar) ? Json("inf") : Json(c.t_bar);
    j["outside_everywhere"] = c.outside_everywhere;
    Json rows = Json::array();
    for (std::size_t k = 0; k < c.verdicts.size(); ++k)
        rows.push_back({{"sector", k + 1},
                        {"verdict", to_string(c.verdicts[k])},
                        {"L_minus", c.L_minus(static_cast<Eigen::Index>(k))}});
    j["sectors"] = rows;
    return j;
}

Json to_json(const TableResult& t) {
    Json j;
    j["id"] = t.id;
    j["title"] = t.title;
    j["passed"] = t.passed();
    Json cells = Json::array();
    for (const TableCell& c : t.cells) {
        cells.push_back({{"provenance", c.provenance},
                         {"theta", std::isnan(c.theta) ? Json(nullptr) : Json(c.theta)},
                         {"sector", c.sector},
                         {"statistic", c.statistic},
                         {"value", c.value},
                         {"stderr", c.std_error},
                         {"reference", c.reference},
                         {"tolerance", c.tolerance},
                         {"pass", c.pass()}});
    }
    j["cells"] = cells;
    return j;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& header,
                     const std::vector<std::string>& columns)
    : out_(path), width_(columns.size()) {
    if (!out_) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
    for (const auto& [k, v] : header) out_ << "# " << k << "=" << v << "\n";
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

void write_histogram(const std::filesystem::path& path, const Histogram& h,
                     const std::vector<std::pair<std::string, std::string>>& header) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
    for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
    out << "bin_left bin_right count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) out << fmt(h.edges[b]) << " " << fmt(h.edges[b + 1]) << " " << h.counts[b] << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace rigidnet
