#include "losstail/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "losstail/error.hpp"

namespace losstail {

Json to_json(const DistributionSpec& spec) {
  Json j;
  j["family"] = std::string(family_name(spec.family()));
  j["params"] = std::vector<double>(spec.params().begin(), spec.params().end());
  return j;
}

DistributionSpec distribution_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family") || !j.contains("params")) {
    throw InputError("distribution JSON needs 'family' and 'params'");
  }
  return DistributionSpec(parse_family(j.at("family").get<std::string>()),
                          j.at("params").get<std::vector<double>>());
}

Json to_json(const AdjustedModel& model) {
  Json j;
  j["base"] = to_json(model.base());
  if (const auto& up = model.upper()) {
    j["upper"] = {{"adjuster", to_json(up->adjuster)},
                  {"p_upper", up->p_upper},
                  {"x_upper", up->x_upper}};
  }
  if (const auto& lo = model.lower()) {
    j["lower"] = {{"adjuster", to_json(lo->adjuster)}, {"x_lower", lo->x_lower}};
  }
  return j;
}

AdjustedModel model_from_json(const Json& j) {
  try {
    std::optional<UpperAdjustment> upper;
    std::optional<LowerAdjustment> lower;
    if (j.contains("upper") && !j.at("upper").is_null()) {
      const auto& u = j.at("upper");
      upper = UpperAdjustment{distribution_from_json(u.at("adjuster")),
                              u.at("p_upper").get<double>(), u.at("x_upper").get<double>()};
    }
    if (j.contains("lower") && !j.at("lower").is_null()) {
      const auto& l = j.at("lower");
      lower = LowerAdjustment{distribution_from_json(l.at("adjuster")),
                              l.at("x_lower").get<double>()};
    }
    return AdjustedModel(distribution_from_json(j.at("base")), std::move(upper),
                         std::move(lower));
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  } catch (const ModelInvalidError& e) {
    throw InputError(std::string("invalid model JSON: ") + e.what());
  } catch (const ParameterDomainError& e) {
    throw InputError(std::string("invalid model JSON: ") + e.what());
  }
}

namespace {

void dump_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += Json(it.key()).dump();
        out += ": ";
        dump(out, it.value(), indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(out, j[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      dump_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_canonical(const Json& j) {
  std::string out;
  dump(out, j, 0);
  out += "\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os.flush()) throw InputError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace losstail
