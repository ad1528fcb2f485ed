#include <algorithm>

#include "morkit/remote.hpp"

namespace morkit::remote
{

json encode_matrix(const Matrix& m)
{
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        data.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix decode_matrix(const json& j)
{
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ProtocolError("matrix: expected {rows, cols, data}");
    const auto& r = j["rows"];
    const auto& c = j["cols"];
    const auto& data = j["data"];
    if (!r.is_number_unsigned() && !(r.is_number_integer() && r.get<std::int64_t>() >= 0))
        throw ProtocolError("matrix: bad row count");
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0))
        throw ProtocolError("matrix: bad column count");
    const auto rows = r.get<std::size_t>();
    const auto cols = c.get<std::size_t>();
    if (!data.is_array() || data.size() != rows) throw ProtocolError("matrix: row count mismatch");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = data[i];
        if (!row.is_array() || row.size() != cols) throw ProtocolError("matrix: column count mismatch");
        for (std::size_t k = 0; k < cols; ++k) {
            // NaN/Inf serialize as null
            const auto& v = row[k];
            if (v.is_number())
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v.get<double>();
            else if (v.is_null())
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = std::numeric_limits<double>::quiet_NaN();
            else
                throw ProtocolError("matrix: non-numeric entry");
        }
    }
    return m;
}

Response parse_response(std::string_view line)
{
    json j = json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ProtocolError("response is not a JSON object");
    if (!j.contains("id") || !j["id"].is_number_integer()) throw ProtocolError("response without integer id");
    if (!j.contains("ok") || !j["ok"].is_boolean()) throw ProtocolError("response without boolean ok");
    Response r;
    r.id = j["id"].get<std::int64_t>();
    r.ok = j["ok"].get<bool>();
    if (r.ok) {
        if (!j.contains("result")) throw ProtocolError("ok response without result");
        r.result = std::move(j["result"]);
        return r;
    }
    const auto it = j.find("error");
    if (it == j.end() || !it->is_object() || !it->contains("code") || !(*it)["code"].is_string() ||
        !it->contains("msg") || !(*it)["msg"].is_string())
        throw ProtocolError("error response without {code, msg}");
    r.code = (*it)["code"].get<std::string>();
    r.message = (*it)["msg"].get<std::string>();
    return r;
}

std::size_t longest_array(const json& j)
{
    std::size_t best = 0;
    if (j.is_array()) best = j.size();
    if (j.is_structured())
        for (const auto& v : j) best = std::max(best, longest_array(v));
    return best;
}

}  // namespace morkit::remote
