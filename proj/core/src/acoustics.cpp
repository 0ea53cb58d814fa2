#include "auvsim/acoustics.hpp"

#include "auvsim/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace auvsim::acoustics {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Send: return "send";
    case EventKind::Deliver: return "deliver";
    case EventKind::DropRange: return "drop_range";
    case EventKind::DropContention: return "drop_contention";
    case EventKind::DropModem: return "drop_modem";
    case EventKind::FixRequest: return "fix_request";
    case EventKind::FixDeliver: return "fix_deliver";
    case EventKind::FixDrop: return "fix_drop";
  }
  return "unknown";
}

AcousticChannel::AcousticChannel(ChannelParams params) : params_(params), rng_(params.seed) {
  if (!(params_.sound_speed > 0.0)) throw Error("sound_speed must be > 0");
  if (!(params_.max_range >= 0.0)) throw Error("max_range must be >= 0");
  if (params_.p_contention < 0.0 || params_.p_contention > 1.0) {
    throw Error("p_contention must be in [0, 1]");
  }
}

void AcousticChannel::log(double time, VehicleId sender, VehicleId receiver, EventKind kind,
                          double distance) {
  events_.push_back({time, sender, receiver, kind, distance});
}

bool AcousticChannel::admits(double distance) {
  if (params_.drop_model == DropModel::HardCutoff) return distance <= params_.max_range;
  const double p = params_.max_range > 0.0
                       ? std::clamp(1.0 - distance / params_.max_range, 0.0, 1.0)
                       : 0.0;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
}

bool AcousticChannel::busy(VehicleId id, double t) const {
  auto it = busy_.find(id);
  if (it == busy_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [t](const Window& w) { return t >= w.begin && t <= w.end; });
}

void AcousticChannel::transmit(const AcousticMessage& msg, std::span<const Endpoint> receivers) {
  if (msg.payload.size() > params_.mtu) {
    throw Error(fmt::format("acoustic payload of {} bytes exceeds the {}-byte MTU",
                            msg.payload.size(), params_.mtu));
  }
  const bool sender_up = modem_enabled(msg.sender);
  for (const auto& rx : receivers) {
    if (rx.id == msg.sender) continue;
    const double d = (rx.position - msg.send_position).norm();
    log(msg.send_time, msg.sender, rx.id, EventKind::Send, d);
    if (!sender_up) {
      log(msg.send_time, msg.sender, rx.id, EventKind::DropModem, d);
      continue;
    }
    if (!admits(d)) {
      spdlog::debug("acoustic message {} -> {} dropped at {:.1f} m", msg.sender, rx.id, d);
      log(msg.send_time, msg.sender, rx.id, EventKind::DropRange, d);
      continue;
    }
    inbox_[rx.id].push({msg.send_time + d / params_.sound_speed, next_seq_++, rx.id, d, msg});
  }
}

void AcousticChannel::advance(double now) {
  for (auto& [receiver, queue] : inbox_) {
    while (!queue.empty() && queue.top().arrival <= now) {
      Pending p = queue.top();
      queue.pop();
      if (!modem_enabled(receiver)) {
        log(p.arrival, p.msg.sender, receiver, EventKind::DropModem, p.distance);
        continue;
      }
      if (params_.p_contention > 0.0 && busy(receiver, p.arrival) &&
          std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < params_.p_contention) {
        log(p.arrival, p.msg.sender, receiver, EventKind::DropContention, p.distance);
        continue;
      }
      log(p.arrival, p.msg.sender, receiver, EventKind::Deliver, p.distance);
      ready_[receiver].push_back(std::move(p.msg));
    }
  }
  for (auto& [requester, queue] : fixes_) {
    while (!queue.empty() && queue.front().fix.ready_time <= now) {
      const auto& f = queue.front().fix;
      if (modem_enabled(requester)) {
        log(f.ready_time, requester, f.beacon, EventKind::FixDeliver, f.range);
        ready_fixes_[requester].push_back(f);
      } else {
        log(f.ready_time, requester, f.beacon, EventKind::FixDrop, f.range);
      }
      queue.pop_front();
    }
  }
  // Later arrivals are all after `now`, so older busy windows can go.
  for (auto& [id, windows] : busy_) {
    while (!windows.empty() && windows.front().end < now) windows.pop_front();
  }
}

std::vector<AcousticMessage> AcousticChannel::poll(VehicleId receiver, double now) {
  advance(now);
  std::vector<AcousticMessage> out;
  if (auto it = ready_.find(receiver); it != ready_.end()) out.swap(it->second);
  return out;
}

void AcousticChannel::request_fix(const Endpoint& requester, const Endpoint& beacon, double now) {
  const Vec3 rel = beacon.position - requester.position;
  const double d = rel.norm();
  const double round_trip = 2.0 * d / params_.sound_speed;
  log(now, requester.id, beacon.id, EventKind::FixRequest, d);

  if (params_.p_contention > 0.0) {
    busy_[requester.id].push_back({now, now + round_trip + params_.fix_busy_time});
  }
  if (!modem_enabled(requester.id) || !modem_enabled(beacon.id) || !admits(d)) {
    log(now, requester.id, beacon.id, EventKind::FixDrop, d);
    return;
  }

  LocalizationFix fix;
  fix.beacon = beacon.id;
  fix.range = d;
  fix.azimuth = std::atan2(rel.y(), rel.x());
  fix.elevation = std::atan2(rel.z(), std::hypot(rel.x(), rel.y()));
  fix.fix_time = now;
  fix.ready_time = now + round_trip;
  if (params_.sigma_range > 0.0) {
    fix.range = std::max(0.0, fix.range + std::normal_distribution<double>(0.0, params_.sigma_range)(rng_));
  }
  if (params_.sigma_azimuth > 0.0) {
    fix.azimuth += std::normal_distribution<double>(0.0, params_.sigma_azimuth)(rng_);
  }
  fix.azimuth = wrap_angle(fix.azimuth);

  auto& q = fixes_[requester.id];
  PendingFix pf{fix, next_seq_++};
  auto pos = std::upper_bound(q.begin(), q.end(), pf, [](const PendingFix& a, const PendingFix& b) {
    return a.fix.ready_time != b.fix.ready_time ? a.fix.ready_time < b.fix.ready_time : a.seq < b.seq;
  });
  q.insert(pos, pf);
}

std::vector<LocalizationFix> AcousticChannel::poll_fixes(VehicleId requester, double now) {
  advance(now);
  std::vector<LocalizationFix> out;
  if (auto it = ready_fixes_.find(requester); it != ready_fixes_.end()) out.swap(it->second);
  return out;
}

void AcousticChannel::set_modem_enabled(VehicleId id, bool enabled) {
  if (enabled) {
    disabled_.erase(id);
  } else {
    disabled_.insert(id);
  }
}

std::size_t AcousticChannel::pending() const {
  std::size_t n = 0;
  for (const auto& [id, q] : inbox_) n += q.size();
  return n;
}

std::size_t AcousticChannel::pending_fixes() const {
  std::size_t n = 0;
  for (const auto& [id, q] : fixes_) n += q.size();
  return n;
}

void AcousticChannel::write_event_csv(std::ostream& out) const {
  out << "time,sender,receiver,event,distance\n";
  for (const auto& e : events_) {
    out << fmt::format("{},{},{},{},{}\n", e.time, e.sender, e.receiver, to_string(e.kind), e.distance);
  }
}

}  // namespace auvsim::acoustics
