#include "morkit/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>

#include <json.hpp>

#include "morkit/errors.hpp"

namespace morkit::io
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

template <class T>
T to_little(T v)
{
    static_assert(sizeof(T) == 8);
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    bits = __builtin_bswap64(bits);
    std::memcpy(&v, &bits, 8);
    return v;
}

template <class T>
void write_blob(const fs::path& path, std::span<const T> data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    for (T v : data) {
        const T le = to_little(v);
        out.write(reinterpret_cast<const char*>(&le), sizeof le);
    }
    if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

template <class T>
std::vector<T> read_blob(const fs::path& path, std::size_t count)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
    std::vector<T> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(T)))
        throw InvalidArgument("'" + path.string() + "' is shorter than its header claims");
    char extra;
    if (in.read(&extra, 1)) throw InvalidArgument("'" + path.string() + "' is longer than its header claims");
    for (auto& v : data) v = to_little(v);
    return data;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InvalidArgument("'" + path.string() + "' is not valid JSON");
    return j;
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) { return fs::path(stem.string() + suffix); }

Matrix all_values(const VectorArray& a)
{
    std::vector<std::size_t> all(a.dim());
    std::iota(all.begin(), all.end(), 0);
    return a.dofs(all);
}

/// Appends matrices to one float64 stream and records {offset, rows, cols}.
class BlobWriter
{
   public:
    json add(const Matrix& m)
    {
        const json ref = {{"offset", data_.size()}, {"rows", m.rows()}, {"cols", m.cols()}};
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) data_.push_back(m(i, j));
        return ref;
    }
    json add(const Vector& v) { return add(Matrix(v.transpose())); }
    const std::vector<double>& data() const { return data_; }

   private:
    std::vector<double> data_;
};

class BlobReader
{
   public:
    explicit BlobReader(std::vector<double> data) : data_(std::move(data)) {}
    Matrix matrix(const json& ref) const
    {
        const auto offset = ref.at("offset").get<std::size_t>();
        const auto rows = ref.at("rows").get<std::size_t>();
        const auto cols = ref.at("cols").get<std::size_t>();
        if (offset + rows * cols > data_.size()) throw InvalidArgument("bundle: matrix reference out of range");
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data_[offset + i * cols + j];
        return m;
    }
    Vector vector(const json& ref) const { return matrix(ref).transpose(); }

   private:
    std::vector<double> data_;
};

json functionals_json(const std::vector<ParameterFunctional>& fs)
{
    json j = json::array();
    for (const auto& f : fs) j.push_back(f.to_json());
    return j;
}

std::vector<ParameterFunctional> functionals_from(const json& j)
{
    std::vector<ParameterFunctional> fs;
    for (const auto& f : j) fs.push_back(ParameterFunctional::from_json(f));
    return fs;
}

void write_vtk_header(std::ofstream& out, const std::string& title, std::size_t nx, std::size_t ny, double dx, double dy)
{
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << nx << ' ' << ny << " 1\n";
    out << "ORIGIN 0 0 0\n";
    out << std::setprecision(17) << "SPACING " << dx << ' ' << dy << " 1\n";
}
}  // namespace

void write_vector_array(const fs::path& stem, const VectorArray& a)
{
    std::vector<double> data;
    data.reserve(a.dim() * a.len());
    if (const auto* local = dynamic_cast<const LocalVectorArray*>(&a)) {
        for (std::size_t i = 0; i < a.len(); ++i) {
            auto v = local->vec(i);
            data.insert(data.end(), v.begin(), v.end());
        }
    } else {
        const Matrix m = all_values(a);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    }
    write_blob<double>(with_suffix(stem, ".bin"), data);
    write_json(with_suffix(stem, ".json"),
               {{"dim", a.dim()}, {"len", a.len()}, {"dtype", "float64"}, {"byte_order", "little"}});
}

DenseVectorArray read_vector_array(const fs::path& stem)
{
    const json header = read_json(with_suffix(stem, ".json"));
    if (header.value("dtype", "float64") != "float64" || header.value("byte_order", "little") != "little")
        throw NotSupported("read_vector_array: only little-endian float64 is supported");
    const auto dim = header.at("dim").get<std::size_t>();
    const auto len = header.at("len").get<std::size_t>();
    return DenseVectorArray(dim, read_blob<double>(with_suffix(stem, ".bin"), dim * len));
}

void write_csr(const fs::path& stem, const CsrMatrix& m)
{
    auto to_u64 = [](const std::vector<std::size_t>& v) { return std::vector<std::uint64_t>(v.begin(), v.end()); };
    write_blob<std::uint64_t>(with_suffix(stem, ".row_ptr.bin"), to_u64(m.row_ptr()));
    write_blob<std::uint64_t>(with_suffix(stem, ".col_idx.bin"), to_u64(m.col_idx()));
    write_blob<double>(with_suffix(stem, ".values.bin"), m.values());
    write_json(with_suffix(stem, ".json"), {{"rows", m.rows()},
                                            {"cols", m.cols()},
                                            {"nnz", m.nnz()},
                                            {"format", "csr"},
                                            {"index_dtype", "uint64"},
                                            {"value_dtype", "float64"},
                                            {"byte_order", "little"}});
}

CsrMatrix read_csr(const fs::path& stem)
{
    const json header = read_json(with_suffix(stem, ".json"));
    if (header.value("format", "") != "csr") throw InvalidArgument("read_csr: not a CSR header");
    const auto rows = header.at("rows").get<std::size_t>();
    const auto cols = header.at("cols").get<std::size_t>();
    const auto nnz = header.at("nnz").get<std::size_t>();
    const auto row_ptr = read_blob<std::uint64_t>(with_suffix(stem, ".row_ptr.bin"), rows + 1);
    const auto col_idx = read_blob<std::uint64_t>(with_suffix(stem, ".col_idx.bin"), nnz);
    auto values = read_blob<double>(with_suffix(stem, ".values.bin"), nnz);
    return CsrMatrix(rows, cols, std::vector<std::size_t>(row_ptr.begin(), row_ptr.end()),
                     std::vector<std::size_t>(col_idx.begin(), col_idx.end()), std::move(values));
}

void write_bundle(const fs::path& dir, const ReducedStationaryModel& model, const VectorArray* basis, const EIData* ei)
{
    fs::create_directories(dir);
    BlobWriter blob;
    json j;
    j["format"] = "morkit-reduced-stationary";
    j["version"] = 1;
    j["basis_size"] = model.basis_size();
    j["parameter_space"] = to_json(model.parameter_space());
    j["operator_coefficients"] = functionals_json(model.operator_coefficients());
    j["operator_matrices"] = json::array();
    for (const auto& m : model.operator_matrices()) j["operator_matrices"].push_back(blob.add(m));
    j["rhs_coefficients"] = functionals_json(model.rhs_coefficients());
    j["rhs_vectors"] = json::array();
    for (const auto& v : model.rhs_vectors()) j["rhs_vectors"].push_back(blob.add(v));

    const auto& e = model.estimator();
    json est;
    est["variant"] = e.variant == EstimatorData::Variant::orthonormalized ? "orthonormalized" : "gramian";
    est["rhs_coefficients"] = functionals_json(e.rhs_coefficients);
    est["operator_coefficients"] = functionals_json(e.operator_coefficients);
    est["rhs_coeffs"] = blob.add(e.rhs_coeffs);
    est["operator_coeffs"] = json::array();
    for (const auto& m : e.operator_coeffs) est["operator_coeffs"].push_back(blob.add(m));
    est["gramian"] = blob.add(e.gramian);
    est["coercivity"] = e.coercivity.to_json();
    est["basis_size"] = e.basis_size;
    j["estimator"] = std::move(est);

    if (basis) j["basis"] = blob.add(all_values(*basis));
    if (ei) {
        json ej;
        ej["interpolation_dofs"] = ei->interpolation_dofs;
        ej["interpolation_matrix"] = blob.add(ei->interpolation_matrix);
        ej["collateral_basis"] = blob.add(all_values(*ei->collateral_basis));
        ej["collateral_dim"] = ei->collateral_basis->dim();
        ej["max_errors"] = ei->max_errors;
        j["ei"] = std::move(ej);
    }
    j["blob"] = {{"file", "bundle.bin"}, {"dtype", "float64"}, {"byte_order", "little"}, {"count", blob.data().size()}};
    write_blob<double>(dir / "bundle.bin", blob.data());
    write_json(dir / "bundle.json", j);
}

ReducedBundle read_bundle(const fs::path& dir)
{
    const json j = read_json(dir / "bundle.json");
    if (j.value("format", "") != "morkit-reduced-stationary" || j.value("version", 0) != 1)
        throw InvalidArgument("read_bundle: unsupported bundle format");
    const BlobReader blob(read_blob<double>(dir / "bundle.bin", j.at("blob").at("count").get<std::size_t>()));

    std::vector<Matrix> ops;
    for (const auto& r : j.at("operator_matrices")) ops.push_back(blob.matrix(r));
    std::vector<Vector> rhs;
    for (const auto& r : j.at("rhs_vectors")) rhs.push_back(blob.vector(r));

    const auto& ej = j.at("estimator");
    EstimatorData e;
    e.variant = ej.at("variant") == "gramian" ? EstimatorData::Variant::gramian : EstimatorData::Variant::orthonormalized;
    e.rhs_coefficients = functionals_from(ej.at("rhs_coefficients"));
    e.operator_coefficients = functionals_from(ej.at("operator_coefficients"));
    e.rhs_coeffs = blob.matrix(ej.at("rhs_coeffs"));
    for (const auto& r : ej.at("operator_coeffs")) e.operator_coeffs.push_back(blob.matrix(r));
    e.gramian = blob.matrix(ej.at("gramian"));
    e.coercivity = ParameterFunctional::from_json(ej.at("coercivity"));
    e.basis_size = ej.at("basis_size").get<std::size_t>();

    ReducedBundle b;
    b.model = std::make_shared<ReducedStationaryModel>(functionals_from(j.at("operator_coefficients")), std::move(ops),
                                                       functionals_from(j.at("rhs_coefficients")), std::move(rhs),
                                                       std::move(e), parameter_space_from_json(j.at("parameter_space")));
    if (j.contains("basis"))
        b.basis = std::make_shared<DenseVectorArray>(DenseVectorArray::from_rows(blob.matrix(j["basis"])));
    if (j.contains("ei")) {
        const auto& ej2 = j["ei"];
        EIData ei;
        ei.interpolation_dofs = ej2.at("interpolation_dofs").get<std::vector<std::size_t>>();
        ei.interpolation_matrix = blob.matrix(ej2.at("interpolation_matrix"));
        const Matrix c = blob.matrix(ej2.at("collateral_basis"));
        ei.collateral_basis = c.rows() == 0
                                  ? std::make_shared<DenseVectorArray>(ej2.at("collateral_dim").get<std::size_t>(), 0)
                                  : std::make_shared<DenseVectorArray>(DenseVectorArray::from_rows(c));
        ei.max_errors = ej2.at("max_errors").get<std::vector<double>>();
        b.ei = std::move(ei);
    }
    return b;
}

void write_vtk(const fs::path& path, const toolbox::StructuredMesh& mesh, std::span<const double> u, const std::string& name)
{
    if (u.size() != mesh.dofs()) throw DimensionMismatch("write_vtk: vector length != number of DOFs");
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    const std::size_t np = mesh.n + 1;
    write_vtk_header(out, "morkit thermal block solution", np, np, mesh.h(), mesh.h());
    out << "POINT_DATA " << np * np << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t j = 0; j < np; ++j)
        for (std::size_t i = 0; i < np; ++i) {
            const long d = mesh.dof(i, j);
            out << (d < 0 ? 0.0 : u[static_cast<std::size_t>(d)]) << '\n';
        }
}

void write_vtk(const fs::path& path, const toolbox::BurgersProblem& problem, std::span<const double> u,
               const std::string& name)
{
    const std::size_t cy = problem.dim == 1 ? 1 : problem.cells_y;
    if (u.size() != problem.cells_x * cy) throw DimensionMismatch("write_vtk: vector length != number of cells");
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    const double dy = problem.dim == 1 ? 1.0 : 1.0 / static_cast<double>(cy);
    write_vtk_header(out, "morkit Burgers solution", problem.cells_x + 1, cy + 1,
                     2.0 / static_cast<double>(problem.cells_x), dy);
    out << "CELL_DATA " << u.size() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : u) out << v << '\n';
}

}  // namespace morkit::io
