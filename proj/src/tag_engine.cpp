#include "tmbench/tag_engine.hpp"

namespace tmbench {

TagEngine::TagEngine(const TagSystem& sys) : m_(sys.m) {
  if (m_ < 1) throw MalformedInput("m must be >= 1");
  names_.reserve(sys.alphabet.size());
  for (const Symbol& s : sys.alphabet) {
    if (!ids_.emplace(s, static_cast<int32_t>(names_.size())).second)
      throw MalformedInput("duplicate alphabet symbol: " + s);
    names_.push_back(s);
  }
  off_.resize(names_.size());
  len_.resize(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto it = sys.rules.find(names_[i]);
    if (it == sys.rules.end()) throw MalformedInput("missing rule for symbol: " + names_[i]);
    off_[i] = static_cast<uint32_t>(pool_.size());
    len_[i] = static_cast<uint32_t>(it->second.size());
    for (const Symbol& p : it->second) pool_.push_back(id_of(p));
  }
}

std::vector<int32_t> TagEngine::intern(const Queue& q) const {
  std::vector<int32_t> out;
  out.reserve(q.size());
  for (const Symbol& s : q) out.push_back(id_of(s));
  return out;
}

Queue TagEngine::externalize(const std::vector<int32_t>& ids) const {
  Queue out;
  out.reserve(ids.size());
  for (int32_t v : ids) out.push_back(names_[static_cast<std::size_t>(v)]);
  return out;
}

}  // namespace tmbench
