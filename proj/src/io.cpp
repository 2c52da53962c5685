#include "macjscc/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace macjscc {

using nlohmann::json;

namespace {

json vars_to(const std::vector<Var>& vars) {
  json arr = json::array();
  for (const auto& v : vars) arr.push_back({{"name", v.name}, {"size", v.size}});
  return arr;
}

std::vector<Var> vars_from(const json& arr) {
  std::vector<Var> vars;
  for (const auto& item : arr)
    vars.push_back(Var{item.at("name").get<std::string>(), item.at("size").get<int>()});
  return vars;
}

}  // namespace

std::string pmf_to_json(const Pmf& pmf) {
  json j;
  j["vars"] = vars_to(pmf.variables());
  j["probs"] = pmf.probs();
  return j.dump(2);
}

Pmf pmf_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    return Pmf(vars_from(j.at("vars")), j.at("probs").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw input_error(std::string("pmf document: ") + e.what());
  }
}

std::string kernel_to_json(const Kernel& kernel) {
  json j;
  j["inputs"] = vars_to(kernel.input_vars);
  j["output"] = {{"name", kernel.output_var.name}, {"size", kernel.output_var.size}};
  j["rows"] = kernel.rows;
  return j.dump(2);
}

Kernel kernel_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    Var output{j.at("output").at("name").get<std::string>(), j.at("output").at("size").get<int>()};
    return Kernel(vars_from(j.at("inputs")), output,
                  j.at("rows").get<std::vector<std::vector<double>>>());
  } catch (const json::exception& e) {
    throw input_error(std::string("kernel document: ") + e.what());
  }
}

std::string codebook_to_json(const MixtureCodebook& cb) {
  json users = json::array();
  for (const auto& user : cb.users) {
    json symbols = json::array();
    for (const auto& comps : user) {
      json arr = json::array();
      for (const auto& c : comps) arr.push_back({{"w", c.w}, {"mean", c.mean}, {"var", c.var}});
      symbols.push_back(arr);
    }
    users.push_back(symbols);
  }
  json j;
  j["version"] = "mcb-1";
  j["source"] = json::parse(pmf_to_json(cb.source));
  j["users"] = users;
  return j.dump(2);
}

MixtureCodebook codebook_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    if (j.at("version").get<std::string>() != "mcb-1")
      throw input_error("codebook document: unsupported version");
    MixtureCodebook cb{pmf_from_json(j.at("source").dump()), {}};
    const json& users = j.at("users");
    if (users.size() != 2) throw input_error("codebook document: expected two users");
    for (int u = 0; u < 2; ++u)
      for (const auto& symbol : users[u]) {
        std::vector<MixtureComponent> comps;
        for (const auto& c : symbol)
          comps.push_back(MixtureComponent{c.at("w").get<double>(), c.at("mean").get<double>(),
                                           c.at("var").get<double>()});
        cb.users[u].push_back(std::move(comps));
      }
    cb.validate();
    return cb;
  } catch (const json::exception& e) {
    throw input_error(std::string("codebook document: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw input_error("failed writing " + path);
}

}  // namespace macjscc
