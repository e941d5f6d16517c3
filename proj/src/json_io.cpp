#include "specbound/json_io.hpp"

namespace specbound {

json complex_to_json(Complex z) {
    return json::array({z.real(), z.imag()});
}

json vector_to_json(const CVec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

json matrix_to_json(const CMat& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

json operator_to_json(const ElOp& s) {
    json terms = json::array();
    for (const auto& [a, b] : s.terms)
        terms.push_back(json{{"a", matrix_to_json(a)}, {"b", matrix_to_json(b)}});
    return json{{"dim", s.dim}, {"terms", std::move(terms)}};
}

json witness_to_json(const BlowupWitness& w) {
    json xs = json::array();
    for (const auto& x : w.xs) xs.push_back(matrix_to_json(x));
    return json{{"threshold", w.threshold},
                {"ratios", w.ratios},
                {"xs", std::move(xs)},
                {"construction", w.construction},
                {"seed", w.seed}};
}

json tolerance_to_json(const Tolerance& t) {
    return json{{"rank_rel", t.rank_rel}, {"scalar_rel", t.scalar_rel}, {"spec_abs", t.spec_abs}};
}

static json certificate_to_json(const Certificate& c) {
    json out;
    out["form"] = c.form;
    out["rep"] = c.rep ? operator_to_json(*c.rep) : json(nullptr);
    json lams = json::array();
    for (Complex l : c.lambdas) lams.push_back(complex_to_json(l));
    out["lambdas"] = std::move(lams);
    out["lambda"] = complex_to_json(c.lambda);
    out["zeta0"] = c.zeta0 ? vector_to_json(*c.zeta0) : json(nullptr);
    out["zeta1"] = c.zeta1 ? vector_to_json(*c.zeta1) : json(nullptr);
    out["f"] = c.f ? vector_to_json(*c.f) : json(nullptr);
    out["g"] = c.g ? vector_to_json(*c.g) : json(nullptr);
    out["witness"] = c.witness ? witness_to_json(*c.witness) : json(nullptr);
    return out;
}

json verdict_to_json(const Verdict& v) {
    json checks = json::array();
    for (const auto& c : v.checks)
        checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    json budgets = json::object();
    for (const auto& [name, n] : v.budgets) budgets[name] = n;
    std::string form;
    if (v.certificate) form = v.certificate->form;
    return json{{"status", to_string(v.status)},
                {"form", form.empty() ? json(nullptr) : json(form)},
                {"certificate", v.certificate ? certificate_to_json(*v.certificate) : json(nullptr)},
                {"checks", std::move(checks)},
                {"budgets", std::move(budgets)},
                {"seed", v.seed},
                {"reason", v.reason}};
}

// ---- parsing ------------------------------------------------------------

Complex json_to_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw MatError(path + ": expected [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

CMat json_to_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw MatError(path + ": expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    CMat m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        std::string rpath = path + "[" + std::to_string(i) + "]";
        if (!row.is_array()) throw MatError(rpath + ": expected an array of [re, im] entries");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            if (cols == 0) throw MatError(rpath + ": empty row");
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw MatError(rpath + ": ragged row length");
        }
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = json_to_complex(row[static_cast<std::size_t>(k)],
                                      rpath + "[" + std::to_string(k) + "]");
    }
    return m;
}

ElOp json_to_operator(const json& j) {
    if (!j.is_object()) throw MatError("operator: expected a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<int>() <= 0)
        throw MatError("dim: expected a positive integer");
    if (!j.contains("terms") || !j["terms"].is_array())
        throw MatError("terms: expected an array");
    ElOp s;
    s.dim = j["dim"].get<int>();
    std::size_t idx = 0;
    for (const json& t : j["terms"]) {
        std::string tpath = "terms[" + std::to_string(idx) + "]";
        if (!t.is_object() || !t.contains("a") || !t.contains("b"))
            throw MatError(tpath + ": expected an object with fields a and b");
        CMat a = json_to_matrix(t["a"], tpath + ".a");
        CMat b = json_to_matrix(t["b"], tpath + ".b");
        if (a.rows() != s.dim || a.cols() != s.dim)
            throw MatError(tpath + ".a: expected a " + std::to_string(s.dim) + "x" +
                           std::to_string(s.dim) + " matrix");
        if (b.rows() != s.dim || b.cols() != s.dim)
            throw MatError(tpath + ".b: expected a " + std::to_string(s.dim) + "x" +
                           std::to_string(s.dim) + " matrix");
        s.terms.emplace_back(std::move(a), std::move(b));
        ++idx;
    }
    s.validate();
    return s;
}

BlowupWitness json_to_witness(const json& j, int dim) {
    if (!j.is_object()) throw MatError("witness: expected a JSON object");
    BlowupWitness w;
    if (!j.contains("ratios") || !j["ratios"].is_array())
        throw MatError("witness.ratios: expected an array");
    for (const json& r : j["ratios"]) {
        if (!r.is_number()) throw MatError("witness.ratios: expected numbers");
        w.ratios.push_back(r.get<double>());
    }
    if (!j.contains("xs") || !j["xs"].is_array()) throw MatError("witness.xs: expected an array");
    std::size_t idx = 0;
    for (const json& x : j["xs"]) {
        CMat m = json_to_matrix(x, "witness.xs[" + std::to_string(idx) + "]");
        if (m.rows() != dim || m.cols() != dim)
            throw MatError("witness.xs[" + std::to_string(idx) + "]: dimension mismatch");
        w.xs.push_back(std::move(m));
        ++idx;
    }
    w.threshold = j.value("threshold", 0.0);
    w.construction = j.value("construction", std::string{});
    w.seed = j.value("seed", std::uint64_t{0});
    return w;
}

}  // namespace specbound
