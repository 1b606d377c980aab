#include "ctmc/model_io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "ctmc/errors.hpp"

namespace ctmc {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json rate_to_json(const RateFunction& f) {
  ordered_json j = ordered_json::array();
  j.push_back(f.constant());
  for (const auto& [k, h] : f.harmonics()) {
    j.push_back(ordered_json::array({k, h.sin_coeff, h.cos_coeff}));
  }
  return j;
}

RateFunction rate_from_json(const json& j) {
  if (j.is_number()) return RateFunction(j.get<double>());
  if (!j.is_array() || j.empty() || !j[0].is_number()) {
    throw ModelError("rate must be a number or [c, [k, sin, cos], ...], got " + j.dump());
  }
  RateFunction f(j[0].get<double>());
  for (std::size_t i = 1; i < j.size(); ++i) {
    const auto& h = j[i];
    if (!h.is_array() || h.size() != 3 || !h[0].is_number_integer() || !h[1].is_number() ||
        !h[2].is_number()) {
      throw ModelError("harmonic must be [k, sin, cos], got " + h.dump());
    }
    const int k = h[0].get<int>();
    if (k < 1) throw ModelError("harmonic index must be >= 1, got " + h.dump());
    f.add_harmonic(k, h[1].get<double>(), h[2].get<double>());
  }
  return f;
}

namespace {

ordered_json table_to_json(const std::map<int, RateFunction>& m) {
  ordered_json j = ordered_json::object();
  for (auto it = m.begin(); it != m.end();) {
    auto run_end = it;
    auto next = std::next(it);
    while (next != m.end() && next->first == run_end->first + 1 && next->second == it->second) {
      run_end = next;
      ++next;
    }
    const std::string key = run_end == it
                                ? std::to_string(it->first)
                                : std::to_string(it->first) + ".." + std::to_string(run_end->first);
    j[key] = rate_to_json(it->second);
    it = next;
  }
  return j;
}

int parse_int(const std::string& s, const std::string& ctx) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ModelError(ctx + ": bad key '" + s + "'");
  return v;
}

std::map<int, RateFunction> table_from_json(const json& j, const std::string& name) {
  std::map<int, RateFunction> out;
  if (!j.is_object()) throw ModelError(name + " must be an object");
  for (const auto& [key, value] : j.items()) {
    const auto dots = key.find("..");
    int lo, hi;
    if (dots == std::string::npos) {
      lo = hi = parse_int(key, name);
    } else {
      lo = parse_int(key.substr(0, dots), name);
      hi = parse_int(key.substr(dots + 2), name);
      if (hi < lo) throw ModelError(name + ": empty range '" + key + "'");
    }
    RateFunction f;
    try {
      f = rate_from_json(value);
    } catch (const ModelError& e) {
      throw ModelError(name + "[" + key + "]: " + e.what());
    }
    for (int i = lo; i <= hi; ++i) {
      if (!out.emplace(i, f).second) {
        throw ModelError(name + ": key " + std::to_string(i) + " given twice");
      }
    }
  }
  return out;
}

}  // namespace

std::string serialize_model(const ChainModel& model) {
  ordered_json j;
  j["schema"] = kModelSchemaVersion;
  j["class"] = std::string(to_string(model.kind));
  j["S"] = model.S;
  j["truncated"] = model.truncated;
  if (!model.birth.empty()) j["birth"] = table_to_json(model.birth);
  if (!model.death.empty()) j["death"] = table_to_json(model.death);
  if (!model.arrival_batch.empty()) j["arrival_batch"] = table_to_json(model.arrival_batch);
  if (!model.service_batch.empty()) j["service_batch"] = table_to_json(model.service_batch);
  return j.dump(2) + "\n";
}

ChainModel parse_model(std::string_view text, std::string_view source) {
  const std::string src(source);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(src + ": " + e.what());
  }
  try {
    if (!j.is_object()) throw ModelError("top level must be an object");
    if (j.contains("schema") && j["schema"].get<int>() != kModelSchemaVersion) {
      throw ModelError("unsupported schema version " + j["schema"].dump());
    }
    for (const auto& [key, value] : j.items()) {
      static const char* known[] = {"schema", "class", "S", "truncated", "birth",
                                    "death", "arrival_batch", "service_batch"};
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* k) { return key == k; }) == std::end(known)) {
        throw ModelError("unknown field '" + key + "'");
      }
    }
    if (!j.contains("class") || !j.contains("S")) throw ModelError("fields 'class' and 'S' are required");

    ChainModel m;
    m.kind = chain_class_from_string(j["class"].get<std::string>());
    m.S = j["S"].get<int>();
    m.truncated = j.value("truncated", false);
    if (j.contains("birth")) m.birth = table_from_json(j["birth"], "birth");
    if (j.contains("death")) m.death = table_from_json(j["death"], "death");
    if (j.contains("arrival_batch")) m.arrival_batch = table_from_json(j["arrival_batch"], "arrival_batch");
    if (j.contains("service_batch")) m.service_batch = table_from_json(j["service_batch"], "service_batch");
    return m;
  } catch (const json::exception& e) {
    throw ModelError(src + ": " + e.what());
  } catch (const ModelError& e) {
    throw ModelError(src + ": " + e.what());
  }
}

ChainModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

void save_model(const ChainModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file " + path.string());
  out << serialize_model(model);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string model_fingerprint(const ChainModel& model) { return fnv1a_hex(serialize_model(model)); }

}  // namespace ctmc
