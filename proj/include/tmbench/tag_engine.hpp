#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <vector>

#include "tmbench/errors.hpp"
#include "tmbench/tag_system.hpp"

namespace tmbench {

// Interning layer over a validated TagSystem: symbols become dense ids and
// productions a flat pool, so stepping never touches strings.
class TagEngine {
 public:
  explicit TagEngine(const TagSystem& sys);

  int m() const { return m_; }
  std::size_t alphabet_size() const { return names_.size(); }

  int32_t id_of(const Symbol& s) const {
    auto it = ids_.find(s);
    if (it == ids_.end()) throw MalformedInput("symbol not in alphabet: " + s);
    return it->second;
  }
  const Symbol& name_of(int32_t id) const { return names_[static_cast<std::size_t>(id)]; }

  std::vector<int32_t> intern(const Queue& q) const;
  Queue externalize(const std::vector<int32_t>& ids) const;

  uint32_t production_offset(int32_t id) const { return off_[static_cast<std::size_t>(id)]; }
  uint32_t production_length(int32_t id) const { return len_[static_cast<std::size_t>(id)]; }
  const int32_t* production_pool() const { return pool_.data(); }

 private:
  int m_;
  std::vector<Symbol> names_;
  std::unordered_map<Symbol, int32_t> ids_;
  std::vector<int32_t> pool_;
  std::vector<uint32_t> off_;
  std::vector<uint32_t> len_;
};

// Mutable run state over interned symbols. Cell is the storage type; uint8_t
// halves memory traffic when the alphabet fits (compiled TM programs), int32_t
// covers everything else. The queue lives in a vector with a moving head
// index; the dead prefix is trimmed once it dominates the buffer.
template <class Cell>
class IdRun {
 public:
  explicit IdRun(const TagEngine& eng) : m_(static_cast<std::size_t>(eng.m())) {
    if (eng.alphabet_size() > static_cast<std::size_t>(std::numeric_limits<Cell>::max()))
      throw Error("alphabet too large for cell type");
    std::size_t n = eng.alphabet_size();
    off_.resize(n);
    len_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      off_[i] = static_cast<uint32_t>(pool_.size());
      len_[i] = eng.production_length(static_cast<int32_t>(i));
      const int32_t* p = eng.production_pool() + eng.production_offset(static_cast<int32_t>(i));
      for (uint32_t j = 0; j < len_[i]; ++j) pool_.push_back(static_cast<Cell>(p[j]));
    }
  }

  void reset(const std::vector<int32_t>& ids) {
    buf_.clear();
    buf_.reserve(ids.size() + 64);
    for (int32_t v : ids) buf_.push_back(static_cast<Cell>(v));
    head_ = 0;
    steps_ = 0;
  }

  std::size_t size() const { return buf_.size() - head_; }
  Cell head_symbol() const { return buf_[head_]; }
  Cell at(std::size_t i) const { return buf_[head_ + i]; }
  uint64_t steps_taken() const { return steps_; }

  std::vector<int32_t> snapshot() const {
    return std::vector<int32_t>(buf_.begin() + static_cast<std::ptrdiff_t>(head_), buf_.end());
  }

  bool step() {
    if (size() < m_) return false;
    apply(buf_[head_], 1);
    return true;
  }

  // Hands each head symbol to the observer before applying it; used by the
  // instrumentation tests.
  template <class F>
  bool step_observe(F&& on_read) {
    if (size() < m_) return false;
    on_read(static_cast<int32_t>(buf_[head_]));
    apply(buf_[head_], 1);
    return true;
  }

  // Batched stepping: performs up to `limit` consecutive steps that all read
  // the same head symbol (a run). Runs dominate compiled-TM words, where long
  // (symbol x)^k stretches repeat one production; appending k copies at once
  // is far cheaper than k separate steps. Returns the number of steps taken,
  // 0 when halted or limit is 0.
  std::size_t step_run(std::size_t limit) {
    std::size_t avail = size();
    if (limit == 0 || avail < m_) return 0;
    const Cell h = buf_[head_];
    std::size_t k = 1;
    std::size_t scan_end = buf_.size();
    std::size_t pos = head_ + m_;
    if constexpr (sizeof(Cell) == 1) {
      // SWAR fast path for m = 2: test four head positions per 8-byte load.
      if (m_ == 2) {
        const uint64_t hh = 0x0001000100010001ull * static_cast<uint8_t>(h);
        const uint64_t mask = 0x00FF00FF00FF00FFull;
        while (k + 4 <= limit && pos + 8 <= scan_end) {
          uint64_t w;
          std::memcpy(&w, buf_.data() + pos, 8);
          if (((w ^ hh) & mask) != 0) break;
          k += 4;
          pos += 8;
        }
      }
    }
    while (k < limit && pos + m_ <= scan_end && buf_[pos] == h) {
      ++k;
      pos += m_;
    }
    apply(h, k);
    return k;
  }

 private:
  void apply(Cell h, std::size_t k) {
    const std::size_t hi = static_cast<std::size_t>(h);
    const uint32_t L = len_[hi];
    if (L > 0) {
      const Cell* src = pool_.data() + off_[hi];
      std::size_t old = buf_.size();
      std::size_t total = k * L;
      buf_.resize(old + total);
      Cell* dst = buf_.data() + old;
      if (L == 1) {
        std::fill_n(dst, total, src[0]);
      } else {
        // Doubling fill: one seed copy, then O(log k) large self-copies.
        std::memcpy(dst, src, L * sizeof(Cell));
        std::size_t filled = L;
        while (filled < total) {
          std::size_t chunk = std::min(filled, total - filled);
          std::memcpy(dst + filled, dst, chunk * sizeof(Cell));
          filled += chunk;
        }
      }
    }
    head_ += k * m_;
    steps_ += k;
    if (head_ >= 4096 && head_ * 2 >= buf_.size()) {
      buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(head_));
      head_ = 0;
    }
  }

  std::size_t m_;
  std::vector<Cell> pool_;
  std::vector<uint32_t> off_;
  std::vector<uint32_t> len_;
  std::vector<Cell> buf_;
  std::size_t head_ = 0;
  uint64_t steps_ = 0;
};

}  // namespace tmbench
