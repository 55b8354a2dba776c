#include <latept/serialize.hpp>

#include <charconv>
#include <system_error>

#include <latept/errors.hpp>

namespace latept {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw config_error("number formatting failed");
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    out.push_back('\n');
    return out;
}

nlohmann::json matrix_to_json(const UltraMatrix& A) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < A.dim; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int l = 0; l < A.dim; ++l) row.push_back(A.a(i, l));
        entries.push_back(std::move(row));
    }
    return nlohmann::json{{"dim", A.dim}, {"eta", A.eta}, {"entries", std::move(entries)}};
}

UltraMatrix matrix_from_json(const nlohmann::json& spec, double default_eta) {
    const nlohmann::json* entries = nullptr;
    double eta = default_eta;
    if (spec.is_array()) {
        entries = &spec;
    } else if (spec.is_object()) {
        if (!spec.contains("entries"))
            throw config_error("matrix object needs an \"entries\" field");
        entries = &spec.at("entries");
        if (spec.contains("eta")) eta = spec.at("eta").get<double>();
    } else {
        throw config_error("matrix must be a nested array or an object");
    }
    if (!entries->is_array() || entries->empty())
        throw config_error("matrix entries must be a nonempty nested array");
    const int dim = static_cast<int>(entries->size());
    UltraMatrix A;
    A.dim = dim;
    A.eta = eta;
    A.a = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const nlohmann::json& row = (*entries)[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw config_error("matrix rows must all have length " + std::to_string(dim));
        for (int l = 0; l < dim; ++l)
            A.a(i, l) = row[static_cast<std::size_t>(l)].get<double>();
    }
    return A;
}

std::string replica_rows_csv(const std::vector<ReplicaRow>& rows) {
    std::string out = "n,replica,late_count,tuple_count,tuple_count_distinct,seed\n";
    for (const ReplicaRow& r : rows)
        out += csv_line({std::to_string(r.n), std::to_string(r.replica),
                         format_u64(r.late_count), format_u64(r.tuple_count),
                         format_u64(r.tuple_count_distinct), format_u64(r.seed)});
    return out;
}

nlohmann::json tree_to_json(const DecompositionTree& t) {
    if (t.is_leaf()) return nlohmann::json{{"leaf", t.leaf}};
    nlohmann::json children = nlohmann::json::array();
    for (const DecompositionTree& c : t.children) children.push_back(tree_to_json(c));
    return nlohmann::json{{"separation", t.separation}, {"children", std::move(children)}};
}

}  // namespace latept
