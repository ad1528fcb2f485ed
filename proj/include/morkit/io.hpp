#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "morkit/ei.hpp"
#include "morkit/reduction.hpp"
#include "morkit/sparse.hpp"
#include "morkit/toolbox/burgers.hpp"
#include "morkit/toolbox/thermal_block.hpp"
#include "morkit/vector_array.hpp"

namespace morkit::io
{

/// `<stem>.bin`: len * dim little-endian float64, vector-major.
/// `<stem>.json`: {"dim", "len", "dtype": "float64", "byte_order": "little"}.
/// Non-local arrays are read through dofs().
void write_vector_array(const std::filesystem::path& stem, const VectorArray& a);
DenseVectorArray read_vector_array(const std::filesystem::path& stem);

/// `<stem>.json`: {"rows", "cols", "nnz", "format": "csr"} plus
/// `<stem>.row_ptr.bin`, `<stem>.col_idx.bin` (uint64) and
/// `<stem>.values.bin` (float64), all little-endian.
void write_csr(const std::filesystem::path& stem, const CsrMatrix& m);
CsrMatrix read_csr(const std::filesystem::path& stem);

struct ReducedBundle
{
    std::shared_ptr<const ReducedStationaryModel> model;
    /// null if the bundle was written without a basis
    std::shared_ptr<const VectorArray> basis;
    std::optional<EIData> ei;
};

/// Directory with `bundle.json` (coefficient functionals, shapes, EI DOFs,
/// parameter space) and `bundle.bin` (all matrices and vectors as float64).
/// Loading reproduces the online phase bit for bit.
void write_bundle(const std::filesystem::path& dir, const ReducedStationaryModel& model,
                  const VectorArray* basis = nullptr, const EIData* ei = nullptr);
ReducedBundle read_bundle(const std::filesystem::path& dir);

/// Legacy ASCII VTK, STRUCTURED_POINTS with nodal values on the full
/// (n+1) x (n+1) grid; Dirichlet nodes are written as 0.
void write_vtk(const std::filesystem::path& path, const toolbox::StructuredMesh& mesh, std::span<const double> u,
               const std::string& name = "u");

/// Legacy ASCII VTK, STRUCTURED_POINTS with one CELL_DATA value per FV cell.
void write_vtk(const std::filesystem::path& path, const toolbox::BurgersProblem& problem, std::span<const double> u,
               const std::string& name = "u");

}  // namespace morkit::io
