#ifndef EFFHAM_IO_HPP
#define EFFHAM_IO_HPP

#include <string>

#include <json.hpp>

#include "effham/algebra.hpp"
#include "effham/bath.hpp"
#include "effham/oracle.hpp"
#include "effham/perturbation.hpp"
#include "effham/splitting.hpp"

namespace effham {

using Json = nlohmann::json;

// Operators serialize as {dim, re, im} with row-major entries; superoperators
// carry the d^2 x d^2 matrix in the global column-stacking convention.
Json operator_to_json(const Operator& op);
Operator operator_from_json(const Json& j);

Json superop_to_json(const SuperOperator& l);
SuperOperator superop_from_json(const Json& j);

Json split_to_json(const GeneratorSplit& s);
Json haar_mc_to_json(const HaarMcEstimate& e);

Json bath_to_json(const BathSpec& bath);
BathSpec bath_from_json(const Json& j);

Json model_to_json(const SpinModel& model);
SpinModel model_from_json(const Json& j);

Json oracle_report_to_json(const OracleReport& report);

// 17 significant digits, enough for lossless double round trips
std::string format_g17(double x);

std::string kseries_csv(const KSeries& series);
std::string observables_csv(const std::vector<ObservableRow>& rows);
std::string correlation_csv(const CorrelationTable& table);

void write_file(const std::string& path, const std::string& content);

}  // namespace effham

#endif
