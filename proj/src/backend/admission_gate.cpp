// Copyright 2026 The faithedit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <thread>

#include "faithedit/backend.hpp"

namespace faithedit {

namespace {

std::chrono::nanoseconds interval_for(double requests_per_minute) {
  if (requests_per_minute <= 0.0) return std::chrono::nanoseconds{0};
  return std::chrono::nanoseconds{
      static_cast<std::int64_t>(60e9 / requests_per_minute)};
}

}  // namespace

AdmissionGate::Ticket::~Ticket() {
  if (gate_ != nullptr) gate_->release();
}

AdmissionGate::AdmissionGate(int max_in_flight, double requests_per_minute)
    : max_in_flight_(std::max(1, max_in_flight)),
      min_interval_(interval_for(requests_per_minute)) {}

AdmissionGate::Ticket AdmissionGate::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return in_flight_ < max_in_flight_; });
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
  if (min_interval_.count() > 0) {
    const auto now = std::chrono::steady_clock::now();
    const auto slot = std::max(now, next_admission_);
    next_admission_ = slot + min_interval_;
    if (slot > now) {
      // The slot is already counted as in flight, so sleeping here keeps the
      // concurrency bound intact.
      lock.unlock();
      std::this_thread::sleep_until(slot);
      return Ticket(this);
    }
  }
  return Ticket(this);
}

void AdmissionGate::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

int AdmissionGate::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

int AdmissionGate::peak_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

}  // namespace faithedit
