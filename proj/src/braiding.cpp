#include "qvc/braiding.hpp"

#include "qvc/errors.hpp"

namespace qvc {

const std::vector<STerm>* SMapData::find(const std::string& a,
                                         const std::string& b) const {
  auto it = entries.find({a, b});
  if (it == entries.end()) return nullptr;
  return &it->second;
}

void SMapData::validate() const {
  for (const auto& [key, terms] : entries) {
    for (const STerm& t : terms) {
      if (t.f.num().is_zero())
        throw InputError("braiding data: zero coefficient in entry (" +
                         key.first + ", " + key.second + ")");
      if (!fields.count(t.u_label))
        throw InputError("braiding data: unresolved label '" + t.u_label + "'");
      if (!fields.count(t.v_label))
        throw InputError("braiding data: unresolved label '" + t.v_label + "'");
    }
  }
}

SMapData identity_smap(const std::vector<QuantumField>& fs) {
  SMapData s;
  RationalFunction one(MPoly(1L));
  for (const QuantumField& f : fs) s.fields[f.name] = f;
  for (const QuantumField& a : fs)
    for (const QuantumField& b : fs)
      s.entries[{a.name, b.name}] = {STerm{a.name, b.name, one}};
  return s;
}

}  // namespace qvc
