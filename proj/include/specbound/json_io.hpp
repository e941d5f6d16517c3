#pragma once

#include "specbound/classify.hpp"

#include <json.hpp>

namespace specbound {

using nlohmann::json;

// Complex scalars serialize as [re, im]; matrices as nested row arrays.

json complex_to_json(Complex z);
json vector_to_json(const CVec& v);
json matrix_to_json(const CMat& m);
json operator_to_json(const ElOp& s);
json witness_to_json(const BlowupWitness& w);
json verdict_to_json(const Verdict& v);
json tolerance_to_json(const Tolerance& t);

/// Parse failures throw MatError naming the offending field, e.g.
/// "terms[1].a[0][2]: expected [re, im]".
Complex json_to_complex(const json& j, const std::string& path);
CMat json_to_matrix(const json& j, const std::string& path);
ElOp json_to_operator(const json& j);
BlowupWitness json_to_witness(const json& j, int dim);

}  // namespace specbound
