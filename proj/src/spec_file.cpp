#include "tsvflab/spec_file.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

namespace {

using Json = nlohmann::json;

std::string index_path(const std::string& parent, std::size_t i) {
  return parent + "/" + std::to_string(i);
}

const Json& require_field(const Json& object, const std::string& path,
                          const std::string& key) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw SpecError(path, "missing required field '" + key + "'");
  }
  return *it;
}

void reject_unknown_fields(const Json& object, const std::string& path,
                           const std::set<std::string>& known) {
  for (const auto& [key, value] : object.items()) {
    if (!known.contains(key)) {
      throw SpecError(path + "/" + key, "unknown field");
    }
  }
}

double as_number(const Json& node, const std::string& path) {
  if (!node.is_number()) {
    throw SpecError(path, "expected a number");
  }
  return node.get<double>();
}

Complex as_complex(const Json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 2) {
    throw SpecError(path, "expected [re, im]");
  }
  return {as_number(node[0], index_path(path, 0)),
          as_number(node[1], index_path(path, 1))};
}

Eigen::VectorXcd as_vector(const Json& node, const std::string& path,
                           Eigen::Index dim) {
  if (!node.is_array()) {
    throw SpecError(path, "expected an array of [re, im] pairs");
  }
  if (static_cast<Eigen::Index>(node.size()) != dim) {
    throw SpecError(path, "expected " + std::to_string(dim) +
                              " entries, found " +
                              std::to_string(node.size()));
  }
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = as_complex(node[static_cast<std::size_t>(i)],
                      index_path(path, static_cast<std::size_t>(i)));
  }
  return v;
}

Eigen::MatrixXcd as_matrix(const Json& node, const std::string& path,
                           Eigen::Index dim) {
  if (!node.is_array()) {
    throw SpecError(path, "expected an array of rows");
  }
  if (static_cast<Eigen::Index>(node.size()) != dim) {
    throw SpecError(path, "expected " + std::to_string(dim) +
                              " rows, found " + std::to_string(node.size()));
  }
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const std::string row_path =
        index_path(path, static_cast<std::size_t>(r));
    const Json& row = node[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw SpecError(row_path,
                      "expected " + std::to_string(dim) + " entries");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      m(r, c) = as_complex(row[static_cast<std::size_t>(c)],
                           index_path(row_path, static_cast<std::size_t>(c)));
    }
  }
  return m;
}

void require_hermitian(const Eigen::MatrixXcd& m, const std::string& path) {
  const double tol = tolerances().input;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) {
        std::ostringstream msg;
        msg << "matrix is not hermitian: entry (" << r << "," << c
            << ") does not match the conjugate of (" << c << "," << r << ")";
        throw SpecError(path, msg.str());
      }
    }
  }
}

Operator parse_projector(const Json& node, const std::string& path,
                         Eigen::Index dim, std::size_t index_in_partition) {
  if (node.is_array() && !node.empty() && node[0].is_number_integer()) {
    // A list of 1-based basis indices spanning the outcome subspace.
    std::vector<Eigen::Index> indices;
    indices.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
      const Json& entry = node[i];
      if (!entry.is_number_integer()) {
        throw SpecError(index_path(path, i), "expected a basis index");
      }
      const auto one_based = entry.get<long long>();
      if (one_based < 1 || one_based > static_cast<long long>(dim)) {
        throw SpecError(index_path(path, i),
                        "basis index " + std::to_string(one_based) +
                            " out of range 1.." + std::to_string(dim));
      }
      indices.push_back(static_cast<Eigen::Index>(one_based - 1));
    }
    try {
      return basis_projector(dim, indices);
    } catch (const Error& e) {
      throw SpecError(path, e.what());
    }
  }
  Eigen::MatrixXcd entries = as_matrix(node, path, dim);
  require_hermitian(entries, path);
  try {
    return Operator::hermitian(
        std::move(entries), "outcome_" + std::to_string(index_in_partition + 1));
  } catch (const Error& e) {
    throw SpecError(path, e.what());
  }
}

NamedPartition parse_partition(const Json& node, const std::string& path,
                               Eigen::Index dim) {
  if (!node.is_object()) {
    throw SpecError(path, "expected an object with name and projectors");
  }
  reject_unknown_fields(node, path, {"name", "projectors"});
  const Json& name_node = require_field(node, path, "name");
  if (!name_node.is_string()) {
    throw SpecError(path + "/name", "expected a string");
  }
  NamedPartition partition;
  partition.name = name_node.get<std::string>();
  if (partition.name.empty()) {
    throw SpecError(path + "/name", "name must not be empty");
  }
  const Json& projs = require_field(node, path, "projectors");
  if (!projs.is_array() || projs.empty()) {
    throw SpecError(path + "/projectors",
                    "expected a non-empty array of projectors");
  }
  for (std::size_t j = 0; j < projs.size(); ++j) {
    partition.projectors.push_back(parse_projector(
        projs[j], index_path(path + "/projectors", j), dim, j));
  }
  try {
    validate_partition(partition.projectors, dim);
  } catch (const Error& e) {
    throw SpecError(path + "/projectors", e.what());
  }
  return partition;
}

}  // namespace

ExperimentSpecFile parse_spec(std::istream& in) {
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SpecError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw SpecError("", "top-level value must be an object");
  }
  reject_unknown_fields(root, "",
                        {"dim", "pre", "post", "hamiltonian", "t_f",
                         "measurement_times", "partitions"});

  const Json& dim_node = require_field(root, "", "dim");
  if (!dim_node.is_number_integer()) {
    throw SpecError("/dim", "expected an integer");
  }
  const auto dim_value = dim_node.get<long long>();
  if (dim_value < 2) {
    throw SpecError("/dim", "dimension must be at least 2");
  }
  const auto dim = static_cast<Eigen::Index>(dim_value);

  Eigen::VectorXcd pre = as_vector(require_field(root, "", "pre"), "/pre", dim);
  Eigen::VectorXcd post =
      as_vector(require_field(root, "", "post"), "/post", dim);

  Eigen::MatrixXcd h =
      as_matrix(require_field(root, "", "hamiltonian"), "/hamiltonian", dim);
  require_hermitian(h, "/hamiltonian");

  const double t_f =
      as_number(require_field(root, "", "t_f"), "/t_f");
  if (!(t_f > 0.0)) {
    throw SpecError("/t_f", "t_f must be positive");
  }

  const Json& times_node = require_field(root, "", "measurement_times");
  if (!times_node.is_array() || times_node.empty()) {
    throw SpecError("/measurement_times",
                    "expected a non-empty array of times");
  }
  std::vector<double> times;
  times.reserve(times_node.size());
  for (std::size_t i = 0; i < times_node.size(); ++i) {
    const std::string path = index_path("/measurement_times", i);
    const double t = as_number(times_node[i], path);
    if (t < 0.0 || t > t_f) {
      throw SpecError(path, "time must lie in [0, t_f]");
    }
    times.push_back(t);
  }

  const Json& partitions_node = require_field(root, "", "partitions");
  if (!partitions_node.is_array() || partitions_node.empty()) {
    throw SpecError("/partitions",
                    "expected a non-empty array of partitions");
  }
  std::vector<NamedPartition> partitions;
  std::set<std::string> seen_names;
  for (std::size_t i = 0; i < partitions_node.size(); ++i) {
    const std::string path = index_path("/partitions", i);
    NamedPartition partition = parse_partition(partitions_node[i], path, dim);
    if (!seen_names.insert(partition.name).second) {
      throw SpecError(path + "/name",
                      "duplicate partition name '" + partition.name + "'");
    }
    partitions.push_back(std::move(partition));
  }

  TwoStateVector tsv = [&]() -> TwoStateVector {
    try {
      return TwoStateVector(StateVector(std::move(pre)),
                            StateVector(std::move(post)),
                            Operator::hermitian(std::move(h), "H"), 0.0, t_f);
    } catch (const EmptyEnsembleError&) {
      throw;  // a well-formed spec whose selection can never succeed
    } catch (const Error& e) {
      throw SpecError("", e.what());
    }
  }();
  return ExperimentSpecFile{TsvAnalysis{
      std::move(tsv), std::move(partitions), std::move(times), 0}};
}

ExperimentSpecFile parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SpecError("", "cannot open spec file '" + path + "'");
  }
  return parse_spec(in);
}

}  // namespace tsvf
