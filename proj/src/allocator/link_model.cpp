#include <algorithm>
#include <cmath>
#include <numeric>

#include "cran/allocator.hpp"

namespace cran {

namespace {

constexpr double kAssigned = 0.5;

}  // namespace

opt::Vec DirectionModel::read(const Allocation& alloc) const {
  opt::Vec v(static_cast<Eigen::Index>(links.size()));
  for (std::size_t l = 0; l < links.size(); ++l) {
    const auto& lk = links[l];
    const double p = lk.fronthaul ? alloc.p_fronthaul(q, lk.owner, lk.k)
                                  : alloc.p_access(q, lk.owner, lk.k);
    v(static_cast<Eigen::Index>(l)) = p / watts_per_unit(l);
  }
  return v;
}

void DirectionModel::write(const opt::Vec& v, Allocation& alloc) const {
  for (std::size_t l = 0; l < links.size(); ++l) {
    const auto& lk = links[l];
    const double p = std::max(0.0, v(static_cast<Eigen::Index>(l))) * watts_per_unit(l);
    if (lk.fronthaul) alloc.p_fronthaul(q, lk.owner, lk.k) = p;
    else alloc.p_access(q, lk.owner, lk.k) = p;
  }
}

int DirectionModel::find(bool fronthaul, int owner, int k) const {
  for (std::size_t l = 0; l < links.size(); ++l)
    if (links[l].fronthaul == fronthaul && links[l].owner == owner && links[l].k == k)
      return static_cast<int>(l);
  return -1;
}

DirectionModel build_direction_model(const Allocation& alloc, const ChannelRealization& ch,
                                     const NetworkInstance& net, Direction q) {
  DirectionModel m;
  m.q = q;
  m.sigma = ch.noise_power;
  double y_max = 0.0;
  for (int i = 0; i < net.num_users; ++i)
    for (int k = 0; k < net.k1; ++k)
      if (alloc.tau(q, i, k) > kAssigned) {
        const double h = ch.access_gain(q, i, net.users[i].rrh, k);
        m.links.push_back({false, i, k, h});
        y_max = std::max(y_max, alloc.p_access(q, i, k) * h / m.sigma);
      }
  for (int j = 0; j < net.num_rrh; ++j)
    for (int k = 0; k < net.k2; ++k)
      if (alloc.x(q, j, k) > kAssigned) {
        const double h = ch.fronthaul_gain(q, j, k);
        m.links.push_back({true, j, k, h});
        y_max = std::max(y_max, alloc.p_fronthaul(q, j, k) * h / m.sigma);
      }
  m.y_scale = (y_max > 0.0 && std::isfinite(y_max)) ? y_max : 1e-6;
  const double y = m.y_scale;

  m.rates.resize(m.links.size());
  for (std::size_t l = 0; l < m.links.size(); ++l) {
    const LinkVar& a = m.links[l];
    opt::AffineForm interference{1.0, {}};
    for (std::size_t u = 0; u < m.links.size(); ++u) {
      const LinkVar& b = m.links[u];
      if (u == l || b.fronthaul != a.fronthaul || b.k != a.k) continue;
      const int ui = static_cast<int>(u);
      if (a.fronthaul) {
        if (decoded_before(b.gain, b.owner, a.gain, a.owner))
          interference.terms.emplace_back(ui, y * a.gain / b.gain);
        continue;
      }
      const int ja = net.users[a.owner].rrh;
      const int jb = net.users[b.owner].rrh;
      if (ja == jb) {
        if (decoded_before(b.gain, b.owner, a.gain, a.owner))
          interference.terms.emplace_back(ui, y * a.gain / b.gain);
      } else {
        interference.terms.emplace_back(ui, y * ch.access_gain(q, a.owner, jb, a.k) / b.gain);
      }
    }
    opt::DcRate r;
    r.scale = net.w_s;
    r.total = interference;
    r.total.terms.emplace_back(static_cast<int>(l), y);
    r.interference = std::move(interference);
    m.rates[l] = std::move(r);
  }
  return m;
}

void sic_rows(const DirectionModel& m, const NetworkInstance& net, opt::Mat& a, opt::Vec& b) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.links.size());
  std::vector<std::pair<int, int>> pairs;  // (strong, weak)
  auto collect = [&](const std::vector<int>& group) {
    std::vector<UserGain> g;
    for (int l : group) g.push_back({l, m.links[l].gain});
    // Index order of links follows owner order, so this tie-break matches
    // the user/RRH index rule.
    const auto order = sic_order(g);
    for (std::size_t s = 0; s < order.size(); ++s)
      for (std::size_t w = s + 1; w < order.size(); ++w) pairs.emplace_back(order[s], order[w]);
  };
  for (int j = 0; j < net.num_rrh; ++j)
    for (int k = 0; k < net.k1; ++k) {
      std::vector<int> group;
      for (std::size_t l = 0; l < m.links.size(); ++l)
        if (!m.links[l].fronthaul && m.links[l].k == k && net.users[m.links[l].owner].rrh == j)
          group.push_back(static_cast<int>(l));
      if (group.size() > 1) collect(group);
    }
  for (int k = 0; k < net.k2; ++k) {
    std::vector<int> group;
    for (std::size_t l = 0; l < m.links.size(); ++l)
      if (m.links[l].fronthaul && m.links[l].k == k) group.push_back(static_cast<int>(l));
    if (group.size() > 1) collect(group);
  }

  a = opt::Mat::Zero(static_cast<Eigen::Index>(pairs.size()), n);
  b = opt::Vec::Zero(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [s, w] = pairs[r];
    const double ratio = m.links[w].gain / m.links[s].gain;
    const auto row = static_cast<Eigen::Index>(r);
    // ratio * den_s - den_w <= 0, both denominators in units of sigma.
    for (auto [j, c] : m.rates[s].interference.terms) a(row, j) += ratio * c;
    for (auto [j, c] : m.rates[w].interference.terms) a(row, j) -= c;
    b(row) = 1.0 - ratio;
  }
}

Allocation initialize(const NetworkInstance& net, const ChannelRealization& ch) {
  (void)ch;
  Allocation a = Allocation::empty(net);
  for (Direction q : kDirections) {
    for (int j = 0; j < net.num_rrh; ++j) {
      const auto members = net.users_of_rrh(j);
      for (int k = 0; k < net.k1; ++k)
        a.tau(q, members[k % members.size()], k) = 1.0;
    }
    for (int k = 0; k < net.k2; ++k) a.x(q, k % net.num_rrh, k) = 1.0;
  }

  const Direction ul = Direction::Uplink, dl = Direction::Downlink;
  auto count_access = [&](Direction q, int i) {
    int c = 0;
    for (int k = 0; k < net.k1; ++k) c += a.tau(q, i, k) > kAssigned;
    return c;
  };
  for (int i = 0; i < net.num_users; ++i) {
    const int c = count_access(ul, i);
    for (int k = 0; k < net.k1; ++k)
      if (a.tau(ul, i, k) > kAssigned) a.p_access(ul, i, k) = 0.5 * net.p_user_ul / c;
  }
  for (int j = 0; j < net.num_rrh; ++j) {
    int c = 0;
    for (int i : net.users_of_rrh(j)) c += count_access(dl, i);
    for (int i : net.users_of_rrh(j))
      for (int k = 0; k < net.k1; ++k)
        if (a.tau(dl, i, k) > kAssigned) a.p_access(dl, i, k) = 0.5 * net.p_rrh_dl / c;
    int cf = 0;
    for (int k = 0; k < net.k2; ++k) cf += a.x(ul, j, k) > kAssigned;
    for (int k = 0; k < net.k2; ++k)
      if (a.x(ul, j, k) > kAssigned) a.p_fronthaul(ul, j, k) = 0.5 * net.p_rrh_ul / cf;
  }
  int cb = 0;
  for (int j = 0; j < net.num_rrh; ++j)
    for (int k = 0; k < net.k2; ++k) cb += a.x(dl, j, k) > kAssigned;
  for (int j = 0; j < net.num_rrh; ++j)
    for (int k = 0; k < net.k2; ++k)
      if (a.x(dl, j, k) > kAssigned) a.p_fronthaul(dl, j, k) = 0.5 * net.p_bbu_dl / cb;
  refresh_candidate_powers(a, net);
  return a;
}

void refresh_candidate_powers(Allocation& a, const NetworkInstance& net) {
  for (Direction q : kDirections) {
    for (int i = 0; i < net.num_users; ++i) {
      double sum = 0.0;
      int c = 0;
      for (int k = 0; k < net.k1; ++k)
        if (a.tau(q, i, k) > kAssigned) {
          sum += a.p_access(q, i, k);
          ++c;
        }
      if (c == 0) continue;
      for (int k = 0; k < net.k1; ++k)
        if (!(a.tau(q, i, k) > kAssigned)) a.p_access(q, i, k) = sum / c;
    }
    for (int j = 0; j < net.num_rrh; ++j) {
      double sum = 0.0;
      int c = 0;
      for (int k = 0; k < net.k2; ++k)
        if (a.x(q, j, k) > kAssigned) {
          sum += a.p_fronthaul(q, j, k);
          ++c;
        }
      if (c == 0) continue;
      for (int k = 0; k < net.k2; ++k)
        if (!(a.x(q, j, k) > kAssigned)) a.p_fronthaul(q, j, k) = sum / c;
    }
  }
}

std::vector<double> round_assignments(std::span<const double> w, int cap) {
  std::vector<int> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
  std::vector<double> out(w.size(), 0.0);
  const double cutoff = 0.5 / cap;
  for (int r = 0; r < cap && r < static_cast<int>(idx.size()); ++r)
    if (w[idx[r]] > cutoff) out[idx[r]] = 1.0;
  return out;
}

}  // namespace cran
