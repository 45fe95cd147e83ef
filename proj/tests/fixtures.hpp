#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "kummer/forms.hpp"

namespace fixtures {

inline nlohmann::json load(const std::string& name) {
  std::ifstream in(std::string(KUMMER_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in);
}

inline kummer::Fe fe(const kummer::Field* f, const nlohmann::json& v) {
  if (v.is_array()) return f->parse("[" + v[0].get<std::string>() + "," + v[1].get<std::string>() + "]");
  return f->parse(v.get<std::string>());
}

inline kummer::Point4 point(const kummer::Field* f, const nlohmann::json& v) {
  return {fe(f, v[0]), fe(f, v[1]), fe(f, v[2]), fe(f, v[3])};
}

}  // namespace fixtures
