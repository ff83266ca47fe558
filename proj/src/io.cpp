#include "gramlab/io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace gramlab {

CsvError::CsvError(const std::string& what, std::size_t r, std::size_t c)
    : InvalidInput(what + " at row " + std::to_string(r) + ", column " + std::to_string(c)), row(r), column(c) {}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw InvalidInput("not a number: '" + std::string(text) + "'");
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

Table parse_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw CsvError("missing header", 1, 1);
    for (auto& h : split(line)) t.header.push_back(unquote(h));
    const std::size_t cols = t.header.size();
    std::vector<std::vector<double>> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line);
        if (fields.size() != cols)
            throw CsvError("expected " + std::to_string(cols) + " fields, found " + std::to_string(fields.size()), row,
                           std::min(fields.size(), cols) + 1);
        std::vector<double> values(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            try {
                values[c] = parse_double(fields[c]);
            } catch (const InvalidInput&) {
                throw CsvError("non-numeric cell '" + fields[c] + "'", row, c + 1);
            }
        }
        rows.push_back(std::move(values));
    }
    t.values = Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < cols; ++c)
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    return t;
}

Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return parse_csv(in);
}

std::string format_csv(const Table& table) {
    require(table.values.cols() == static_cast<Eigen::Index>(table.header.size()), "header width mismatch");
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) out += (c ? "," : "") + table.header[c];
    out += '\n';
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(table.values(i, c));
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw NumericalFailure("write failed for " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InvalidInput("cannot replace " + path);
    }
}

void write_csv(const std::string& path, const Table& table) { write_file_atomic(path, format_csv(table)); }

Sample sample_from_table(const Table& t) {
    require(t.values.rows() >= 1 && t.values.cols() >= 1, "sample needs at least one row and column");
    return Sample{t.values};
}

LabeledSample labeled_from_table(const Table& t) {
    require(t.values.rows() >= 1 && t.values.cols() >= 2, "labeled sample needs a design column and a label column");
    const Eigen::Index d = t.values.cols() - 1;
    return LabeledSample{t.values.leftCols(d), t.values.col(d)};
}

Table table_from_sample(const LabeledSample& s) {
    Table t;
    for (std::size_t j = 0; j < s.d(); ++j) t.header.push_back("x" + std::to_string(j + 1));
    t.header.push_back("y");
    t.values = Matrix(s.x.rows(), s.x.cols() + 1);
    t.values << s.x, s.y;
    return t;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number_or_null(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v(i)));
    return out;
}

Json to_json(const BoundsReport& r) {
    return Json{{"schema", kSchemaVersion},
                {"lambda", number_or_null(r.lambda)},
                {"mu", number_or_null(r.mu)},
                {"delta_hat", number_or_null(r.delta_hat)},
                {"gamma_minus", number_or_null(r.gamma_minus)},
                {"n_min", number_or_null(r.n_min)},
                {"feasible", r.feasible}};
}

Json to_json(const GramEstimate& g) {
    Json j{{"schema", kSchemaVersion},
           {"kind", "gram"},
           {"method", to_string(g.method)},
           {"matrix", to_json(g.matrix)},
           {"rank", g.rank},
           {"iterations_or_net_size", g.iterations_or_net_size}};
    if (g.method == GramMethod::robust_net) {
        j["constraint_violation"] = number_or_null(g.constraint_violation);
        j["qp_sweeps"] = g.qp_sweeps;
        j["duality_gap"] = number_or_null(g.duality_gap);
    }
    return j;
}

Json to_json(const CovarianceEstimate& c) {
    Json j{{"schema", kSchemaVersion},
           {"kind", "covariance"},
           {"method", to_string(c.method)},
           {"matrix", to_json(c.matrix)}};
    if (c.mean_proxy.size()) j["mean_proxy"] = to_json(c.mean_proxy);
    return j;
}

Json to_json(const RegressionFit& f) {
    return Json{{"schema", kSchemaVersion},         {"kind", "fit"},
                {"method", to_string(f.method)},    {"backend", to_string(f.backend)},
                {"theta", to_json(f.theta)},        {"rank_used", f.rank_used},
                {"extended_gram", to_json(f.extended_gram)}};
}

Json to_json(const Scenario& s) {
    const ScenarioParams& p = s.params;
    Json params{{"d", p.d},
                {"sigma", p.sigma},
                {"p", p.p},
                {"a", p.a},
                {"b", p.b},
                {"rho_m4", p.rho_m4},
                {"mix_weight", p.mix_weight},
                {"noise_narrow", p.noise_narrow},
                {"noise_wide", p.noise_wide},
                {"design_scale", p.design_scale},
                {"intercept", p.intercept}};
    if (p.theta_star) params["theta_star"] = to_json(*p.theta_star);
    return Json{{"name", to_string(s.name)}, {"params", params}};
}

Json to_json(const ExperimentResult& r) {
    Json summary = Json::array();
    for (const auto& s : r.summary) {
        Json e{{"estimator", to_string(s.estimator)},
               {"mean", number_or_null(s.mean)},
               {"median", number_or_null(s.median)},
               {"count", s.count},
               {"missing", s.missing}};
        if (s.truncated_mean) e["truncated_mean"] = number_or_null(*s.truncated_mean);
        summary.push_back(e);
    }
    return Json{{"schema", kSchemaVersion},
                {"kind", "experiment"},
                {"trials", r.records.size()},
                {"summary", summary},
                {"reference", r.plug_in ? "plug_in_1e6" : "analytic"},
                {"runtime_seconds", r.runtime_seconds}};
}

Matrix matrix_from_json(const Json& j) {
    require(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        require(j[i].is_array() && j[i].size() == cols, "matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            require(j[i][c].is_number(), "matrix entries must be numbers");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
        }
    }
    return m;
}

Scenario scenario_from_json(const Json& j) {
    require(j.is_object() && j.contains("name") && j["name"].is_string(), "scenario config needs a string 'name'");
    Scenario s = Scenario::make(parse_scenario_name(j["name"].get<std::string>()));
    for (const auto& [key, _] : j.items())
        require(key == "name" || key == "params", "unknown scenario key: " + key);
    if (!j.contains("params")) return s;
    const Json& p = j["params"];
    require(p.is_object(), "'params' must be an object");
    ScenarioParams& q = s.params;
    for (const auto& [key, value] : p.items()) {
        if (key == "theta_star") {
            require(value.is_array(), "theta_star must be an array");
            Vector v(static_cast<Eigen::Index>(value.size()));
            for (std::size_t i = 0; i < value.size(); ++i) {
                require(value[i].is_number(), "theta_star entries must be numbers");
                v(static_cast<Eigen::Index>(i)) = value[i].get<double>();
            }
            q.theta_star = v;
            continue;
        }
        require(value.is_number(), "scenario parameter '" + key + "' must be a number");
        const double x = value.get<double>();
        if (key == "d") {
            require(value.is_number_integer(), "d must be an integer");
            q.d = value.get<int>();
        } else if (key == "sigma") q.sigma = x;
        else if (key == "p") q.p = x;
        else if (key == "a") q.a = x;
        else if (key == "b") q.b = x;
        else if (key == "rho_m4") q.rho_m4 = x;
        else if (key == "mix_weight") q.mix_weight = x;
        else if (key == "noise_narrow") q.noise_narrow = x;
        else if (key == "noise_wide") q.noise_wide = x;
        else if (key == "design_scale") q.design_scale = x;
        else if (key == "intercept") q.intercept = x;
        else throw InvalidInput("unknown scenario parameter: " + key);
    }
    s.analytic();  // validates
    return s;
}

Table records_table(const ExperimentResult& r) {
    Table t;
    t.header.push_back("trial");
    for (Estimator e : r.estimators) t.header.push_back(to_string(e));
    t.values = Matrix(static_cast<Eigen::Index>(r.records.size()), static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        t.values(row, 0) = r.records[i].trial;
        for (std::size_t k = 0; k < r.estimators.size(); ++k)
            t.values(row, static_cast<Eigen::Index>(k) + 1) =
                r.records[i].excess[k] ? *r.records[i].excess[k] : std::numeric_limits<double>::quiet_NaN();
    }
    return t;
}

Table quantile_csv_table(const QuantileTable& q) { return Table{q.header, q.values}; }

}  // namespace gramlab
