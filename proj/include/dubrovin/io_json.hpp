#pragma once

// JSON (de)serialization for the product/deformation data and matrices, plus
// a flat CSV writer for matrices.  Complex numbers are two-element arrays
// [re, im]; bare numbers are accepted on input for hand-written files.
// Parse failures throw ParseError carrying the offending field path.

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "complex_matrix.hpp"
#include "product_algebra.hpp"

namespace dubrovin {

using nlohmann::json;

class ParseError : public std::runtime_error {
public:
    std::string path;
    ParseError(const std::string& field_path, const std::string& msg)
        : std::runtime_error(field_path + ": " + msg), path(field_path) {}
};

inline Complex parse_complex(const json& j, const std::string& path) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ParseError(path, "expected a number or [re, im]");
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline CMatrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty array of rows");
    const int rows = static_cast<int>(j.size());
    if (!j[0].is_array() || j[0].empty())
        throw ParseError(path + "[0]", "expected a non-empty row array");
    const int cols = static_cast<int>(j[0].size());
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        const std::string rpath = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(rpath, "expected a row of length " + std::to_string(cols));
        for (int c = 0; c < cols; ++c)
            m(i, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                    rpath + "[" + std::to_string(c) + "]");
    }
    return m;
}

inline json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < m.cols(); ++j2) row.push_back(complex_json(m(i, j2)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ProductTable parse_product_table(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ParseError(path + ".dim", "expected an integer");
    const int dim = j["dim"].get<int>();
    if (dim <= 0) throw ParseError(path + ".dim", "must be positive");
    if (!j.contains("pairing")) throw ParseError(path + ".pairing", "missing");
    const CMatrix pairing = parse_matrix(j["pairing"], path + ".pairing");
    if (pairing.rows() != dim || pairing.cols() != dim)
        throw ParseError(path + ".pairing", "must be dim x dim");

    ProductTable t;
    try {
        t = make_product_table(dim, pairing);
    } catch (const std::exception& e) {
        throw ParseError(path + ".pairing", e.what());
    }

    if (!j.contains("gamma") || !j["gamma"].is_array() ||
        static_cast<int>(j["gamma"].size()) != dim)
        throw ParseError(path + ".gamma", "expected dim outer entries");
    for (int i = 0; i < dim; ++i) {
        const json& gi = j["gamma"][static_cast<std::size_t>(i)];
        const std::string ipath = path + ".gamma[" + std::to_string(i) + "]";
        if (!gi.is_array() || static_cast<int>(gi.size()) != dim)
            throw ParseError(ipath, "expected dim entries");
        for (int jj = 0; jj < dim; ++jj) {
            const json& gj = gi[static_cast<std::size_t>(jj)];
            const std::string jpath = ipath + "[" + std::to_string(jj) + "]";
            if (!gj.is_array() || static_cast<int>(gj.size()) != dim)
                throw ParseError(jpath, "expected dim entries");
            for (int k = 0; k < dim; ++k)
                t.set_gamma(i, jj, k,
                            parse_complex(gj[static_cast<std::size_t>(k)],
                                          jpath + "[" + std::to_string(k) + "]"));
        }
    }
    return t;
}

inline json product_table_json(const ProductTable& t) {
    json g = json::array();
    for (int i = 0; i < t.dim; ++i) {
        json gi = json::array();
        for (int j2 = 0; j2 < t.dim; ++j2) {
            json gj = json::array();
            for (int k = 0; k < t.dim; ++k) gj.push_back(complex_json(t.gamma_at(i, j2, k)));
            gi.push_back(std::move(gj));
        }
        g.push_back(std::move(gi));
    }
    return json{{"dim", t.dim}, {"gamma", std::move(g)}, {"pairing", matrix_json(t.pairing)}};
}

inline GwData parse_gw_data(const json& j, const std::string& path = "") {
    const std::string root = path.empty() ? "gw_data" : path;
    if (!j.is_object()) throw ParseError(root, "expected an object");
    GwData d;
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ParseError(root + ".dim", "expected an integer");
    d.dim = j["dim"].get<int>();
    if (!j.contains("h2_rank") || !j["h2_rank"].is_number_integer())
        throw ParseError(root + ".h2_rank", "expected an integer");
    d.h2_rank = j["h2_rank"].get<int>();
    if (!j.contains("cup")) throw ParseError(root + ".cup", "missing");
    d.cup = parse_product_table(j["cup"], root + ".cup");
    if (d.cup.dim != d.dim) throw ParseError(root + ".cup.dim", "must equal dim");

    if (!j.contains("classes") || !j["classes"].is_array())
        throw ParseError(root + ".classes", "expected an array");
    for (std::size_t c = 0; c < j["classes"].size(); ++c) {
        const json& jc = j["classes"][c];
        const std::string cpath = root + ".classes[" + std::to_string(c) + "]";
        if (!jc.is_object()) throw ParseError(cpath, "expected an object");
        GwClass cl;
        if (!jc.contains("exponents") || !jc["exponents"].is_array())
            throw ParseError(cpath + ".exponents", "expected an array of integers");
        for (std::size_t e = 0; e < jc["exponents"].size(); ++e) {
            const json& je = jc["exponents"][e];
            if (!je.is_number_integer())
                throw ParseError(cpath + ".exponents[" + std::to_string(e) + "]",
                                 "expected an integer");
            cl.exponents.push_back(je.get<int>());
        }
        if (!jc.contains("invariants") || !jc["invariants"].is_array() ||
            static_cast<int>(jc["invariants"].size()) != d.dim)
            throw ParseError(cpath + ".invariants", "expected dim outer entries");
        cl.invariants.assign(static_cast<std::size_t>(d.dim) * d.dim * d.dim,
                             Complex(0.0, 0.0));
        for (int a = 0; a < d.dim; ++a) {
            const json& ja = jc["invariants"][static_cast<std::size_t>(a)];
            const std::string apath = cpath + ".invariants[" + std::to_string(a) + "]";
            if (!ja.is_array() || static_cast<int>(ja.size()) != d.dim)
                throw ParseError(apath, "expected dim entries");
            for (int b = 0; b < d.dim; ++b) {
                const json& jb = ja[static_cast<std::size_t>(b)];
                const std::string bpath = apath + "[" + std::to_string(b) + "]";
                if (!jb.is_array() || static_cast<int>(jb.size()) != d.dim)
                    throw ParseError(bpath, "expected dim entries");
                for (int k = 0; k < d.dim; ++k)
                    cl.invariants[d.cup.g_index(a, b, k)] =
                        parse_complex(jb[static_cast<std::size_t>(k)],
                                      bpath + "[" + std::to_string(k) + "]");
            }
        }
        d.classes.push_back(std::move(cl));
    }
    try {
        validate(d);
    } catch (const std::exception& e) {
        throw ParseError(root, e.what());
    }
    return d;
}

inline json gw_data_json(const GwData& d) {
    json classes = json::array();
    for (const auto& cl : d.classes) {
        json inv = json::array();
        for (int a = 0; a < d.dim; ++a) {
            json ja = json::array();
            for (int b = 0; b < d.dim; ++b) {
                json jb = json::array();
                for (int k = 0; k < d.dim; ++k)
                    jb.push_back(complex_json(cl.invariants[d.cup.g_index(a, b, k)]));
                ja.push_back(std::move(jb));
            }
            inv.push_back(std::move(ja));
        }
        classes.push_back(json{{"exponents", cl.exponents}, {"invariants", std::move(inv)}});
    }
    return json{{"dim", d.dim},
                {"h2_rank", d.h2_rank},
                {"cup", product_table_json(d.cup)},
                {"classes", std::move(classes)}};
}

inline json load_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ParseError(file, "cannot open file");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(file, std::string("invalid JSON: ") + e.what());
    }
    return j;
}

// rows "name,row,col,re,im"
inline void write_matrix_csv(std::ostream& os, const std::string& name, const CMatrix& m) {
    os.precision(17);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            os << name << ',' << i << ',' << j << ',' << m(i, j).real() << ','
               << m(i, j).imag() << '\n';
}

}  // namespace dubrovin
