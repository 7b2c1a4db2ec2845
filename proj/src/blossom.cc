// Copyright 2026 The catrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Maximum-weight general matching via Edmonds' blossom algorithm with
// primal-dual updates, O(n^3). Follows the structure of Joris van Rantwijk's
// public-domain reference implementation, using integer arithmetic only.

#include <algorithm>
#include <tuple>
#include <vector>

#include "catrep/decoder.hpp"
#include "catrep/errors.hpp"

namespace catrep::decoder {

namespace {

class Blossom {
 public:
  Blossom(int64_t nv, const std::vector<std::tuple<int64_t, int64_t, int64_t>> &edges, bool maxcard)
      : nv_(nv), edges_(edges), maxcard_(maxcard) {}

  std::vector<int64_t> solve();

 private:
  using Vec = std::vector<int64_t>;

  int64_t ei(int64_t k) const { return std::get<0>(edges_[size_t(k)]); }
  int64_t ej(int64_t k) const { return std::get<1>(edges_[size_t(k)]); }
  int64_t ew(int64_t k) const { return std::get<2>(edges_[size_t(k)]); }
  int64_t slack(int64_t k) const { return dual_[size_t(ei(k))] + dual_[size_t(ej(k))] - 2 * ew(k); }
  static int64_t wrap(int64_t j, int64_t len) { return ((j % len) + len) % len; }

  void leaves(int64_t b, Vec &out) const;
  Vec leaves(int64_t b) const {
    Vec out;
    leaves(b, out);
    return out;
  }
  void assign_label(int64_t w, int64_t t, int64_t p);
  int64_t scan_blossom(int64_t v, int64_t w);
  void add_blossom(int64_t base, int64_t k);
  void expand_blossom(int64_t b, bool endstage);
  void augment_blossom(int64_t b, int64_t v);
  void augment_matching(int64_t k);

  int64_t nv_;
  const std::vector<std::tuple<int64_t, int64_t, int64_t>> &edges_;
  bool maxcard_;

  Vec endpoint_;
  std::vector<Vec> neighbend_;
  Vec mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_, dual_;
  std::vector<Vec> childs_, endps_, bestedges_;
  std::vector<bool> has_bestedges_;
  Vec unused_;
  std::vector<bool> allowedge_;
  Vec queue_;
};

void Blossom::leaves(int64_t b, Vec &out) const {
  if (b < nv_) {
    out.push_back(b);
    return;
  }
  for (int64_t t : childs_[size_t(b)]) leaves(t, out);
}

void Blossom::assign_label(int64_t w, int64_t t, int64_t p) {
  int64_t b = inblossom_[size_t(w)];
  label_[size_t(w)] = label_[size_t(b)] = t;
  labelend_[size_t(w)] = labelend_[size_t(b)] = p;
  bestedge_[size_t(w)] = bestedge_[size_t(b)] = -1;
  if (t == 1) {
    leaves(b, queue_);
  } else if (t == 2) {
    int64_t base = blossombase_[size_t(b)];
    int64_t mb = mate_[size_t(base)];
    assign_label(endpoint_[size_t(mb)], 1, mb ^ 1);
  }
}

int64_t Blossom::scan_blossom(int64_t v, int64_t w) {
  Vec path;
  int64_t base = -1;
  while (v != -1 || w != -1) {
    int64_t b = inblossom_[size_t(v)];
    if (label_[size_t(b)] & 4) {
      base = blossombase_[size_t(b)];
      break;
    }
    path.push_back(b);
    label_[size_t(b)] = 5;
    if (labelend_[size_t(b)] == -1) {
      v = -1;
    } else {
      v = endpoint_[size_t(labelend_[size_t(b)])];
      b = inblossom_[size_t(v)];
      v = endpoint_[size_t(labelend_[size_t(b)])];
    }
    if (w != -1) std::swap(v, w);
  }
  for (int64_t b : path) label_[size_t(b)] = 1;
  return base;
}

void Blossom::add_blossom(int64_t base, int64_t k) {
  int64_t v = ei(k), w = ej(k);
  int64_t bb = inblossom_[size_t(base)];
  int64_t bv = inblossom_[size_t(v)];
  int64_t bw = inblossom_[size_t(w)];
  int64_t b = unused_.back();
  unused_.pop_back();
  blossombase_[size_t(b)] = base;
  blossomparent_[size_t(b)] = -1;
  blossomparent_[size_t(bb)] = b;
  Vec path, endps;
  while (bv != bb) {
    blossomparent_[size_t(bv)] = b;
    path.push_back(bv);
    endps.push_back(labelend_[size_t(bv)]);
    v = endpoint_[size_t(labelend_[size_t(bv)])];
    bv = inblossom_[size_t(v)];
  }
  path.push_back(bb);
  std::reverse(path.begin(), path.end());
  std::reverse(endps.begin(), endps.end());
  endps.push_back(2 * k);
  while (bw != bb) {
    blossomparent_[size_t(bw)] = b;
    path.push_back(bw);
    endps.push_back(labelend_[size_t(bw)] ^ 1);
    w = endpoint_[size_t(labelend_[size_t(bw)])];
    bw = inblossom_[size_t(w)];
  }
  childs_[size_t(b)] = path;
  endps_[size_t(b)] = endps;
  label_[size_t(b)] = 1;
  labelend_[size_t(b)] = labelend_[size_t(bb)];
  dual_[size_t(b)] = 0;
  for (int64_t u : leaves(b)) {
    if (label_[size_t(inblossom_[size_t(u)])] == 2) queue_.push_back(u);
    inblossom_[size_t(u)] = b;
  }
  Vec bestedgeto(size_t(2 * nv_), -1);
  for (int64_t sub : path) {
    std::vector<Vec> nblists;
    if (!has_bestedges_[size_t(sub)]) {
      for (int64_t u : leaves(sub)) {
        Vec l;
        for (int64_t p : neighbend_[size_t(u)]) l.push_back(p / 2);
        nblists.push_back(std::move(l));
      }
    } else {
      nblists.push_back(bestedges_[size_t(sub)]);
    }
    for (const auto &nbl : nblists) {
      for (int64_t kk : nbl) {
        int64_t i = ei(kk), j = ej(kk);
        if (inblossom_[size_t(j)] == b) std::swap(i, j);
        int64_t bj = inblossom_[size_t(j)];
        if (bj != b && label_[size_t(bj)] == 1 &&
            (bestedgeto[size_t(bj)] == -1 || slack(kk) < slack(bestedgeto[size_t(bj)]))) {
          bestedgeto[size_t(bj)] = kk;
        }
      }
    }
    bestedges_[size_t(sub)].clear();
    has_bestedges_[size_t(sub)] = false;
    bestedge_[size_t(sub)] = -1;
  }
  Vec be;
  for (int64_t kk : bestedgeto) {
    if (kk != -1) be.push_back(kk);
  }
  bestedges_[size_t(b)] = be;
  has_bestedges_[size_t(b)] = true;
  bestedge_[size_t(b)] = -1;
  for (int64_t kk : be) {
    if (bestedge_[size_t(b)] == -1 || slack(kk) < slack(bestedge_[size_t(b)])) bestedge_[size_t(b)] = kk;
  }
}

void Blossom::expand_blossom(int64_t b, bool endstage) {
  const Vec childs = childs_[size_t(b)];
  for (int64_t s : childs) {
    blossomparent_[size_t(s)] = -1;
    if (s < nv_) {
      inblossom_[size_t(s)] = s;
    } else if (endstage && dual_[size_t(s)] == 0) {
      expand_blossom(s, endstage);
    } else {
      for (int64_t u : leaves(s)) inblossom_[size_t(u)] = s;
    }
  }
  if (!endstage && label_[size_t(b)] == 2) {
    const Vec &endps = endps_[size_t(b)];
    const int64_t len = int64_t(childs.size());
    int64_t entrychild = inblossom_[size_t(endpoint_[size_t(labelend_[size_t(b)] ^ 1)])];
    int64_t j = int64_t(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
    int64_t jstep, endptrick;
    if (j & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    int64_t p = labelend_[size_t(b)];
    while (j != 0) {
      label_[size_t(endpoint_[size_t(p ^ 1)])] = 0;
      label_[size_t(endpoint_[size_t(endps[size_t(wrap(j - endptrick, len))] ^ endptrick ^ 1)])] = 0;
      assign_label(endpoint_[size_t(p ^ 1)], 2, p);
      allowedge_[size_t(endps[size_t(wrap(j - endptrick, len))] / 2)] = true;
      j += jstep;
      p = endps[size_t(wrap(j - endptrick, len))] ^ endptrick;
      allowedge_[size_t(p / 2)] = true;
      j += jstep;
    }
    int64_t bv = childs[size_t(wrap(j, len))];
    label_[size_t(endpoint_[size_t(p ^ 1)])] = label_[size_t(bv)] = 2;
    labelend_[size_t(endpoint_[size_t(p ^ 1)])] = labelend_[size_t(bv)] = p;
    bestedge_[size_t(bv)] = -1;
    j += jstep;
    while (childs[size_t(wrap(j, len))] != entrychild) {
      bv = childs[size_t(wrap(j, len))];
      if (label_[size_t(bv)] == 1) {
        j += jstep;
        continue;
      }
      int64_t found = -1;
      for (int64_t u : leaves(bv)) {
        if (label_[size_t(u)] != 0) {
          found = u;
          break;
        }
      }
      if (found >= 0) {
        label_[size_t(found)] = 0;
        label_[size_t(endpoint_[size_t(mate_[size_t(blossombase_[size_t(bv)])])])] = 0;
        assign_label(found, 2, labelend_[size_t(found)]);
      }
      j += jstep;
    }
  }
  label_[size_t(b)] = labelend_[size_t(b)] = -1;
  childs_[size_t(b)].clear();
  endps_[size_t(b)].clear();
  blossombase_[size_t(b)] = -1;
  bestedges_[size_t(b)].clear();
  has_bestedges_[size_t(b)] = false;
  bestedge_[size_t(b)] = -1;
  unused_.push_back(b);
}

void Blossom::augment_blossom(int64_t b, int64_t v) {
  int64_t t = v;
  while (blossomparent_[size_t(t)] != b) t = blossomparent_[size_t(t)];
  if (t >= nv_) augment_blossom(t, v);
  Vec &childs = childs_[size_t(b)];
  Vec &endps = endps_[size_t(b)];
  const int64_t len = int64_t(childs.size());
  const int64_t i = int64_t(std::find(childs.begin(), childs.end(), t) - childs.begin());
  int64_t j = i, jstep, endptrick;
  if (i & 1) {
    j -= len;
    jstep = 1;
    endptrick = 0;
  } else {
    jstep = -1;
    endptrick = 1;
  }
  while (j != 0) {
    j += jstep;
    t = childs[size_t(wrap(j, len))];
    int64_t p = endps[size_t(wrap(j - endptrick, len))] ^ endptrick;
    if (t >= nv_) augment_blossom(t, endpoint_[size_t(p)]);
    j += jstep;
    t = childs[size_t(wrap(j, len))];
    if (t >= nv_) augment_blossom(t, endpoint_[size_t(p ^ 1)]);
    mate_[size_t(endpoint_[size_t(p)])] = p ^ 1;
    mate_[size_t(endpoint_[size_t(p ^ 1)])] = p;
  }
  std::rotate(childs.begin(), childs.begin() + i, childs.end());
  std::rotate(endps.begin(), endps.begin() + i, endps.end());
  blossombase_[size_t(b)] = blossombase_[size_t(childs[0])];
}

void Blossom::augment_matching(int64_t k) {
  const int64_t v = ei(k), w = ej(k);
  for (auto [s, p] : {std::pair{v, 2 * k + 1}, std::pair{w, 2 * k}}) {
    while (true) {
      int64_t bs = inblossom_[size_t(s)];
      if (bs >= nv_) augment_blossom(bs, s);
      mate_[size_t(s)] = p;
      if (labelend_[size_t(bs)] == -1) break;
      int64_t t = endpoint_[size_t(labelend_[size_t(bs)])];
      int64_t bt = inblossom_[size_t(t)];
      s = endpoint_[size_t(labelend_[size_t(bt)])];
      int64_t j = endpoint_[size_t(labelend_[size_t(bt)] ^ 1)];
      if (bt >= nv_) augment_blossom(bt, j);
      mate_[size_t(j)] = labelend_[size_t(bt)];
      p = labelend_[size_t(bt)] ^ 1;
    }
  }
}

std::vector<int64_t> Blossom::solve() {
  const int64_t ne = int64_t(edges_.size());
  const size_t n2 = size_t(2 * nv_);
  int64_t maxweight = 0;
  for (const auto &e : edges_) maxweight = std::max(maxweight, std::get<2>(e));
  endpoint_.resize(size_t(2 * ne));
  for (int64_t p = 0; p < 2 * ne; ++p) endpoint_[size_t(p)] = (p % 2 == 0) ? ei(p / 2) : ej(p / 2);
  neighbend_.assign(size_t(nv_), {});
  for (int64_t k = 0; k < ne; ++k) {
    neighbend_[size_t(ei(k))].push_back(2 * k + 1);
    neighbend_[size_t(ej(k))].push_back(2 * k);
  }
  mate_.assign(size_t(nv_), -1);
  label_.assign(n2, 0);
  labelend_.assign(n2, -1);
  inblossom_.resize(size_t(nv_));
  for (int64_t i = 0; i < nv_; ++i) inblossom_[size_t(i)] = i;
  blossomparent_.assign(n2, -1);
  childs_.assign(n2, {});
  endps_.assign(n2, {});
  blossombase_.assign(n2, -1);
  for (int64_t i = 0; i < nv_; ++i) blossombase_[size_t(i)] = i;
  bestedge_.assign(n2, -1);
  bestedges_.assign(n2, {});
  has_bestedges_.assign(n2, false);
  unused_.clear();
  for (int64_t i = nv_; i < 2 * nv_; ++i) unused_.push_back(i);
  dual_.assign(n2, 0);
  for (int64_t i = 0; i < nv_; ++i) dual_[size_t(i)] = maxweight;
  allowedge_.assign(size_t(ne), false);

  for (int64_t stage = 0; stage < nv_; ++stage) {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (size_t b = size_t(nv_); b < n2; ++b) {
      bestedges_[b].clear();
      has_bestedges_[b] = false;
    }
    std::fill(allowedge_.begin(), allowedge_.end(), false);
    queue_.clear();
    for (int64_t v = 0; v < nv_; ++v) {
      if (mate_[size_t(v)] == -1 && label_[size_t(inblossom_[size_t(v)])] == 0) assign_label(v, 1, -1);
    }
    bool augmented = false;
    while (true) {
      while (!queue_.empty() && !augmented) {
        int64_t v = queue_.back();
        queue_.pop_back();
        for (int64_t p : neighbend_[size_t(v)]) {
          int64_t k = p / 2;
          int64_t w = endpoint_[size_t(p)];
          if (inblossom_[size_t(v)] == inblossom_[size_t(w)]) continue;
          int64_t kslack = 0;
          if (!allowedge_[size_t(k)]) {
            kslack = slack(k);
            if (kslack <= 0) allowedge_[size_t(k)] = true;
          }
          if (allowedge_[size_t(k)]) {
            if (label_[size_t(inblossom_[size_t(w)])] == 0) {
              assign_label(w, 2, p ^ 1);
            } else if (label_[size_t(inblossom_[size_t(w)])] == 1) {
              int64_t base = scan_blossom(v, w);
              if (base >= 0) {
                add_blossom(base, k);
              } else {
                augment_matching(k);
                augmented = true;
                break;
              }
            } else if (label_[size_t(w)] == 0) {
              label_[size_t(w)] = 2;
              labelend_[size_t(w)] = p ^ 1;
            }
          } else if (label_[size_t(inblossom_[size_t(w)])] == 1) {
            int64_t b = inblossom_[size_t(v)];
            if (bestedge_[size_t(b)] == -1 || kslack < slack(bestedge_[size_t(b)])) bestedge_[size_t(b)] = k;
          } else if (label_[size_t(w)] == 0) {
            if (bestedge_[size_t(w)] == -1 || kslack < slack(bestedge_[size_t(w)])) bestedge_[size_t(w)] = k;
          }
        }
      }
      if (augmented) break;

      int deltatype = -1;
      int64_t delta = 0, deltaedge = -1, deltablossom = -1;
      if (!maxcard_) {
        deltatype = 1;
        delta = *std::min_element(dual_.begin(), dual_.begin() + nv_);
      }
      for (int64_t v = 0; v < nv_; ++v) {
        if (label_[size_t(inblossom_[size_t(v)])] == 0 && bestedge_[size_t(v)] != -1) {
          int64_t d = slack(bestedge_[size_t(v)]);
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge_[size_t(v)];
          }
        }
      }
      for (size_t b = 0; b < n2; ++b) {
        if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
          int64_t kslack = slack(bestedge_[b]);
          if (kslack % 2 != 0) throw NumericError("blossom: odd slack");
          int64_t d = kslack / 2;
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge_[b];
          }
        }
      }
      for (size_t b = size_t(nv_); b < n2; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
            (deltatype == -1 || dual_[b] < delta)) {
          delta = dual_[b];
          deltatype = 4;
          deltablossom = int64_t(b);
        }
      }
      if (deltatype == -1) {
        deltatype = 1;
        delta = std::max<int64_t>(0, *std::min_element(dual_.begin(), dual_.begin() + nv_));
      }
      for (int64_t v = 0; v < nv_; ++v) {
        int64_t l = label_[size_t(inblossom_[size_t(v)])];
        if (l == 1) {
          dual_[size_t(v)] -= delta;
        } else if (l == 2) {
          dual_[size_t(v)] += delta;
        }
      }
      for (size_t b = size_t(nv_); b < n2; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
          if (label_[b] == 1) {
            dual_[b] += delta;
          } else if (label_[b] == 2) {
            dual_[b] -= delta;
          }
        }
      }
      if (deltatype == 1) break;
      if (deltatype == 2) {
        allowedge_[size_t(deltaedge)] = true;
        int64_t i = ei(deltaedge), j = ej(deltaedge);
        if (label_[size_t(inblossom_[size_t(i)])] == 0) std::swap(i, j);
        queue_.push_back(i);
      } else if (deltatype == 3) {
        allowedge_[size_t(deltaedge)] = true;
        queue_.push_back(ei(deltaedge));
      } else {
        expand_blossom(deltablossom, false);
      }
    }
    if (!augmented) break;
    for (size_t b = size_t(nv_); b < n2; ++b) {
      if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dual_[b] == 0) {
        expand_blossom(int64_t(b), true);
      }
    }
  }
  std::vector<int64_t> mate(size_t(nv_), -1);
  for (int64_t v = 0; v < nv_; ++v) {
    if (mate_[size_t(v)] >= 0) mate[size_t(v)] = endpoint_[size_t(mate_[size_t(v)])];
  }
  return mate;
}

}  // namespace

std::vector<int64_t> max_weight_matching(int64_t num_vertices,
                                         const std::vector<std::tuple<int64_t, int64_t, int64_t>> &edges,
                                         bool max_cardinality) {
  for (const auto &[i, j, w] : edges) {
    (void)w;
    if (i < 0 || j < 0 || i >= num_vertices || j >= num_vertices || i == j) {
      throw InputError("max_weight_matching: bad edge endpoint");
    }
  }
  if (edges.empty()) return std::vector<int64_t>(size_t(std::max<int64_t>(num_vertices, 0)), -1);
  Blossom b(num_vertices, edges, max_cardinality);
  return b.solve();
}

}  // namespace catrep::decoder
