#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "dppgeo/duality.hpp"
#include "dppgeo/embedding.hpp"
#include "dppgeo/estimation.hpp"
#include "dppgeo/geometry.hpp"
#include "dppgeo/kernel.hpp"

namespace dppgeo::io {

using json = nlohmann::json;

/// Sorted 1-based array; the empty set is [].
json to_json(const SubsetId& subset);
SubsetId subset_from_json(int m, const json& j);

json matrix_to_json(const Matrix& a);        // {"rows", "cols", "data" row-major}
json nested_matrix_to_json(const Matrix& a);  // [[...], ...]
Matrix matrix_from_nested(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);
json tensor_to_json(const Tensor3& t);  // {"shape": [n0, n1, n2], "data": [...]}

/// {"m", "matrix", "kind": "L" | "K"}
json to_json(const LKernel& l);
json to_json(const MarginalKernel& k);

/// {"m", "u1", "u2", "signs"}
json to_json(const UPoint& u);
UPoint upoint_from_json(const json& j);

/// {"m", "theta"}
json to_json(const ThetaPoint& theta);
ThetaPoint theta_from_json(const json& j);

/// {"m", "eta1", "u2", "signs"}
json to_json(const MixedPoint& omega);
MixedPoint mixed_from_json(const json& j);

/// {"m", "observations": [[...], ...]}
json to_json(const Dataset& data);
Dataset dataset_from_json(const json& j);

json to_json(const FitResult& fit);

/// Any accepted point document resolved to u coordinates: a kernel (L or K),
/// a u point, a theta point on the model, a mixed point, or a fit result
/// (its u_hat).
UPoint point_from_json(const json& j);

json read_file(const std::string& path);

}  // namespace dppgeo::io
