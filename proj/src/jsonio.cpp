#include "sicforge/jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sicforge::jsonio {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_impl(const json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * (static_cast<std::size_t>(depth) + 1), ' ');
    const std::string pad_close(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + json(it.key()).dump() + ": ";
                dump_impl(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad_close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Flat arrays of numbers stay on one line.
            bool scalars_only = true;
            for (const auto& el : j) {
                if (el.is_structured()) {
                    scalars_only = false;
                    break;
                }
            }
            if (scalars_only) {
                out += "[";
                bool first = true;
                for (const auto& el : j) {
                    if (!first) out += ", ";
                    first = false;
                    dump_impl(el, out, indent, depth);
                }
                out += "]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                dump_impl(el, out, indent, depth + 1);
            }
            out += "\n" + pad_close + "]";
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

double number_at(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string("expected a number for ") + what);
    return j.get<double>();
}

qmat::Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw ParseError("expected a [re, im] pair");
    }
    return {number_at(j[0], "re"), number_at(j[1], "im")};
}

}  // namespace

std::string dump(const json& j, int indent) {
    std::string out;
    dump_impl(j, out, indent, 0);
    out += "\n";
    return out;
}

void write_file(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << dump(j);
}

json read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open file: " + path);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON in " + path);
    return j;
}

json complex_to_json(qmat::Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const qmat::Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

qmat::Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty matrix array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
    if (cols == 0) throw ParseError("expected matrix rows to be arrays");
    qmat::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!j[static_cast<std::size_t>(r)].is_array() ||
            static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
            throw ParseError("ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        }
    }
    return m;
}

json sic_set_to_json(const sic::SicSet& s, const SicSetMeta& meta) {
    json j;
    j["dim"] = s.dim;
    json projectors = json::array();
    for (const auto& p : s.projectors) projectors.push_back(matrix_to_json(p));
    j["projectors"] = std::move(projectors);
    j["meta"] = {{"source", meta.source}, {"seed", meta.seed}, {"tolerance", meta.tolerance}};
    return j;
}

sic::SicSet sic_set_from_json(const json& j, double tol) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("projectors")) {
        throw ParseError("SIC set file must contain 'dim' and 'projectors'");
    }
    if (!j["dim"].is_number_integer()) throw ParseError("'dim' must be an integer");
    const int d = j["dim"].get<int>();
    if (d < 2) throw ParseError("'dim' must be >= 2");
    const auto& pj = j["projectors"];
    if (!pj.is_array() || static_cast<int>(pj.size()) != d * d) {
        throw ParseError("expected d² = " + std::to_string(d * d) + " projectors");
    }
    std::vector<qmat::Matrix> projectors;
    projectors.reserve(pj.size());
    for (const auto& mj : pj) {
        qmat::Matrix m = matrix_from_json(mj);
        if (m.rows() != d || m.cols() != d) throw ParseError("projector has wrong dimension");
        projectors.push_back(std::move(m));
    }
    double use_tol = tol;
    if (use_tol < 0.0) {
        use_tol = 1e-10;
        if (j.contains("meta") && j["meta"].contains("tolerance") &&
            j["meta"]["tolerance"].is_number()) {
            use_tol = j["meta"]["tolerance"].get<double>();
        }
    }
    return sic::make_sic_set(std::move(projectors), use_tol);
}

json search_state_to_json(const sicsearch::SearchState& st) {
    json j;
    j["dim"] = st.dim;
    json q = json::array();
    for (Eigen::Index r = 0; r < st.qtilde.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < st.qtilde.cols(); ++c) row.push_back(st.qtilde(r, c));
        q.push_back(std::move(row));
    }
    j["qtilde"] = std::move(q);
    j["objective"] = st.objective;
    json v = json::array();
    for (Eigen::Index i = 0; i < st.v.size(); ++i) v.push_back(st.v(i));
    j["v"] = std::move(v);
    j["residual_eq41"] = st.residual_matrix_equation;
    j["seed"] = st.seed;
    j["iterations"] = st.iterations;
    j["converged"] = st.converged;
    return j;
}

spintomo::DirectionSet directions_from_json(const json& j) {
    if (!j.is_object() || !j.contains("directions") || !j["directions"].is_array()) {
        throw ParseError("direction file must contain a 'directions' array");
    }
    spintomo::DirectionSet ds;
    for (const auto& dj : j["directions"]) {
        if (!dj.is_array() || dj.size() != 3) throw ParseError("each direction must be [nx,ny,nz]");
        try {
            ds.directions.push_back(qmat::Direction::from_cartesian(
                number_at(dj[0], "nx"), number_at(dj[1], "ny"), number_at(dj[2], "nz")));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }
    return ds;
}

json directions_to_json(const spintomo::DirectionSet& ds) {
    json arr = json::array();
    for (const auto& d : ds.directions) arr.push_back(json::array({d.n.x(), d.n.y(), d.n.z()}));
    return json{{"directions", std::move(arr)}};
}

json density_to_json(const qmat::Matrix& rho) {
    return json{{"dim", static_cast<int>(rho.rows())}, {"rho", matrix_to_json(rho)}};
}

qmat::Matrix density_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("rho")) {
        throw ParseError("state file must contain 'dim' and 'rho'");
    }
    qmat::Matrix rho = matrix_from_json(j["rho"]);
    if (!j["dim"].is_number_integer() || rho.rows() != j["dim"].get<int>() ||
        rho.cols() != j["dim"].get<int>()) {
        throw ParseError("'rho' dimensions do not match 'dim'");
    }
    return rho;
}

json symbol_to_json(const starprod::Symbol& f, const starprod::Scheme& s) {
    json j;
    j["scheme"] = f.scheme_label;
    json index = json::array();
    for (const auto& pt : s.points) {
        json coords = json::array();
        for (double c : pt.coords) coords.push_back(c);
        index.push_back(std::move(coords));
    }
    j["index"] = std::move(index);
    json values = json::array();
    for (Eigen::Index x = 0; x < f.values.size(); ++x) values.push_back(complex_to_json(f.values(x)));
    j["values"] = std::move(values);
    return j;
}

json scheme_to_json(const starprod::Scheme& s) {
    json j;
    j["label"] = s.label;
    j["dim"] = s.op_dim();
    json index = json::array();
    for (const auto& pt : s.points) {
        json coords = json::array();
        for (double c : pt.coords) coords.push_back(c);
        index.push_back(std::move(coords));
    }
    j["index"] = std::move(index);
    json weights = json::array();
    for (double w : s.weights) weights.push_back(w);
    j["weights"] = std::move(weights);
    json deq = json::array(), quant = json::array();
    for (const auto& u : s.dequantizers) deq.push_back(matrix_to_json(u));
    for (const auto& d : s.quantizers) quant.push_back(matrix_to_json(d));
    j["dequantizers"] = std::move(deq);
    j["quantizers"] = std::move(quant);
    return j;
}

json kernel_to_json(const starprod::KernelTensor& k) {
    json j;
    j["scheme"] = k.scheme_label;
    j["dual"] = k.dual;
    j["n"] = k.n;
    json entries = json::array();
    for (std::size_t x1 = 0; x1 < k.n; ++x1) {
        json plane = json::array();
        for (std::size_t x2 = 0; x2 < k.n; ++x2) {
            json row = json::array();
            for (std::size_t x = 0; x < k.n; ++x) row.push_back(complex_to_json(k.at(x1, x2, x)));
            plane.push_back(std::move(row));
        }
        entries.push_back(std::move(plane));
    }
    j["entries"] = std::move(entries);
    return j;
}

}  // namespace sicforge::jsonio
