#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dssf/csv.hpp"

namespace dssf {

using ConfigValue = std::variant<double, std::string, std::vector<double>>;

// Every key lives in a section ("field.b0"). Defaults come from one table
// (see config_defaults), with a few sweep keys depending on the scenario.
class ScenarioConfig {
 public:
  std::map<std::string, ConfigValue> values;

  const std::string& scenario() const { return str("scenario.name"); }
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;

  bool operator==(const ScenarioConfig& o) const { return values == o.values; }
};

enum class ConfigKind { Number, Integer, Text, List };

struct ConfigKeyDef {
  std::string section;
  std::string key;
  ConfigKind kind;
  std::string default_text;
  std::string doc;
};
const std::vector<ConfigKeyDef>& config_defaults();
// Sweep defaults that depend on the scenario: (scenario, "section.key") -> text.
const std::map<std::pair<std::string, std::string>, std::string>& scenario_overrides();

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Sectioned key = value text; '#' starts a comment; lists are comma separated.
// Throws ConfigError listing every violation (syntax, unknown keys, guards).
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& c);
// Guard violations, each naming the owning type or invariant.
std::vector<std::string> validate_config(const ScenarioConfig& c);

const std::vector<std::string>& scenario_names();

enum class RowStatus { Pass, Fail, Info };
const char* status_name(RowStatus s);

struct ResultRow {
  std::string scenario;
  double lambda = 0.0;  // NaN when the row has no spectral parameter
  double s = 0.0;       // NaN when the row has no threshold
  std::string params;   // remaining parameters, "k=v;k=v"
  std::string metric;
  double value = 0.0;
  double error = 0.0;
  double lower = 0.0, upper = 0.0;  // declared bracket (NaN when open)
  RowStatus status = RowStatus::Info;
};

struct ScenarioResult {
  std::vector<ResultRow> rows;               // sorted by (scenario, lambda, s, metric, params)
  std::map<std::string, CsvTable> tables;    // companion CSVs by table name
  bool all_pass() const;
  std::size_t failures() const;
};

// Throws std::runtime_error carrying the scenario name around downstream errors.
ScenarioResult run_scenario(const ScenarioConfig& c);

void sort_rows(std::vector<ResultRow>& rows);
CsvTable rows_table(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
// Main CSV at path plus <stem>.<table>.csv next to it. Returns the written paths.
std::vector<std::string> write_result(const ScenarioResult& r, const std::string& path);

}  // namespace dssf
