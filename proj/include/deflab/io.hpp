#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "deflab/channel.hpp"
#include "deflab/deficiency.hpp"
#include "deflab/experiment.hpp"
#include "deflab/morphism.hpp"
#include "deflab/witness.hpp"

namespace deflab {

using Json = nlohmann::ordered_json;

// Experiment file schema, version 1:
//   { "version": 1, "dim": n, "states": [ matrix, ... ] }
// where a matrix is an n x n array of [re, im] pairs.
Experiment load_experiment(const std::string& path);
Experiment experiment_from_json(const Json& doc);
Json experiment_to_json(const Experiment& e);

// Loss file schema, version 1: { "version": 1, "loss": [[...], ...] } with
// one row per parameter.
LossFunction load_loss(const std::string& path);
LossFunction loss_from_json(const Json& doc);

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json report_to_json(const DeficiencyReport& r, std::optional<double> eps,
                    bool keep_samples = true);
Json witness_to_json(const WitnessConstruction& w);
Json separation_to_json(const SeparationReport& r, double s1, double s2);
Json extension_to_json(const CpExtensionData& x, double epsilon);
Json reduction_to_json(const ClassicalReduction& r);

// Deterministic serialization: keys in insertion order, numbers with 17
// significant digits.
void write_json(std::ostream& os, const Json& doc, int indent = 2);
std::string json_to_string(const Json& doc, int indent = 2);

// Number formatting used by the TSV curve export (12 significant digits).
std::string format_tsv(double v);

}  // namespace deflab
