#include "evoplc/genome_json.hpp"

#include <fmt/format.h>

#include "evoplc/errors.hpp"

namespace evoplc::genome {

namespace {

std::string_view op_name(Operator op) {
  switch (op) {
    case Operator::Assign:
      return "ASSIGN";
    case Operator::And:
      return "AND";
    case Operator::Or:
      return "OR";
  }
  return "";
}

Operator parse_op(const std::string& s, std::size_t line) {
  if (s == "ASSIGN") return Operator::Assign;
  if (s == "AND") return Operator::And;
  if (s == "OR") return Operator::Or;
  throw ParseError(fmt::format("row {}: unknown operator '{}'", line, s));
}

}  // namespace

nlohmann::ordered_json rows_to_json(const Individual& individual) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < individual.rows.size(); ++i) {
    const auto& row = individual.rows[i];
    nlohmann::ordered_json obj;
    obj["line"] = i;
    obj["output"] = row.output ? nlohmann::ordered_json(std::string(name(*row.output))) : nlohmann::ordered_json(nullptr);
    obj["input"] = std::string(name(row.input));
    obj["op"] = std::string(op_name(row.op));
    obj["neg"] = row.negated;
    obj["mode"] = row.mode == Mode::Automatic ? "A" : "M";
    arr.push_back(std::move(obj));
  }
  return arr;
}

Individual rows_from_json(const nlohmann::ordered_json& array) {
  if (!array.is_array()) throw ParseError("genome must be a JSON array of rows");
  Individual ind;
  try {
    for (std::size_t i = 0; i < array.size(); ++i) {
      const auto& obj = array[i];
      if (obj.at("line").get<std::size_t>() != i) throw ParseError(fmt::format("row {}: line numbers must count up from 0", i));
      GenomeRow row;
      if (!obj.at("output").is_null()) {
        const auto text = obj.at("output").get<std::string>();
        row.output = parse_output(text);
        if (!row.output) throw ParseError(fmt::format("row {}: unknown output '{}'", i, text));
      }
      const auto input = obj.at("input").get<std::string>();
      const auto parsed = parse_input(input);
      if (!parsed) throw ParseError(fmt::format("row {}: unknown input '{}'", i, input));
      row.input = *parsed;
      row.op = parse_op(obj.at("op").get<std::string>(), i);
      row.negated = obj.at("neg").get<bool>();
      const auto mode = obj.at("mode").get<std::string>();
      if (mode != "A" && mode != "M") throw ParseError(fmt::format("row {}: mode must be A or M", i));
      row.mode = mode == "A" ? Mode::Automatic : Mode::Manual;
      ind.rows.push_back(row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return ind;
}

std::string to_json_text(const Individual& individual) {
  const auto arr = rows_to_json(individual);
  if (arr.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out += "  " + arr[i].dump();
    out += i + 1 < arr.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

Individual from_json_text(std::string_view text) {
  nlohmann::ordered_json parsed;
  try {
    parsed = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return rows_from_json(parsed);
}

}  // namespace evoplc::genome
