#include "trotter_shuffle/row_io.hpp"

#include <regex>

#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle {

using nlohmann::json;

json row_to_json(const ArrayRow &row) {
    const auto d        = row.d();
    json       elements = json::array();
    for(const auto &M : row.elements())
        for(Eigen::Index i = 0; i < d; ++i)
            for(Eigen::Index j = 0; j < d; ++j) elements.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
    return json{{"n", row.n()}, {"d", d}, {"elements", std::move(elements)}};
}

ArrayRow row_from_json(const json &doc) {
    if(!doc.is_object() || !doc.contains("n") || !doc.contains("d") || !doc.contains("elements"))
        throw InvalidInput("row json: expected an object with n, d, elements");
    const auto n        = doc.at("n").get<std::size_t>();
    const auto d        = doc.at("d").get<Eigen::Index>();
    const auto &entries = doc.at("elements");
    if(n < 1 || d < 1) throw InvalidInput("row json: n and d must be positive");
    if(!entries.is_array() || entries.size() != n * static_cast<std::size_t>(d * d))
        throw InvalidInput("row json: expected n*d*d [re, im] entries");
    std::vector<CMatrix> elements;
    elements.reserve(n);
    std::size_t k = 0;
    for(std::size_t e = 0; e < n; ++e) {
        CMatrix M(d, d);
        for(Eigen::Index i = 0; i < d; ++i)
            for(Eigen::Index j = 0; j < d; ++j, ++k) {
                const auto &pair = entries[k];
                if(!pair.is_array() || pair.size() != 2) throw InvalidInput("row json: entry is not a [re, im] pair");
                M(i, j) = Scalar(pair[0].get<double>(), pair[1].get<double>());
            }
        elements.push_back(std::move(M));
    }
    return ArrayRow::from_elements(std::move(elements));
}

CMatrix matrix_from_json(const json &value, Eigen::Index d) {
    if(value.is_string()) {
        const auto  name = value.get<std::string>();
        std::smatch m;
        static const std::regex unit_re("E([0-9])([0-9])");
        if(std::regex_match(name, m, unit_re)) return matlin::unit(d, std::stoi(m[1]), std::stoi(m[2]));
        if(name == "identity") return matlin::identity(d);
        if(name == "zero") return matlin::zero(d);
        if(name == "sigma_x" || name == "sigma_y" || name == "sigma_z") {
            if(d != 2) throw InvalidInput("matrix '" + name + "' needs d = 2");
            CMatrix P = CMatrix::Zero(2, 2);
            if(name == "sigma_x") P << 0, 1, 1, 0;
            if(name == "sigma_y") P << 0, Scalar(0, -1), Scalar(0, 1), 0;
            if(name == "sigma_z") P << 1, 0, 0, -1;
            return P;
        }
        throw InvalidInput("unknown matrix name '" + name + "'");
    }
    if(!value.is_array() || value.empty()) throw InvalidInput("matrix: expected a name or a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(value.size());
    CMatrix    M(rows, rows);
    for(Eigen::Index i = 0; i < rows; ++i) {
        const auto &r = value[static_cast<std::size_t>(i)];
        if(!r.is_array() || static_cast<Eigen::Index>(r.size()) != rows) throw InvalidInput("matrix: rows must form a square array");
        for(Eigen::Index j = 0; j < rows; ++j) {
            const auto &x = r[static_cast<std::size_t>(j)];
            if(x.is_number()) M(i, j) = x.get<double>();
            else if(x.is_array() && x.size() == 2) M(i, j) = Scalar(x[0].get<double>(), x[1].get<double>());
            else throw InvalidInput("matrix: entries must be numbers or [re, im]");
        }
    }
    matlin::require_valid(M, "matrix literal");
    return M;
}

json matrix_to_json(const CMatrix &M) {
    json rows = json::array();
    for(Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for(Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace trotter_shuffle
