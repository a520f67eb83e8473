// Copyright 2026 The fluxsim Authors
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

#include "fluxsim/frame.hpp"

#include <cmath>

namespace fluxsim {
namespace {

double wrap(double x) { return std::remainder(x, kTwoPi); }

void check_qubit(int q) {
  if (q != 0 && q != 1) throw InvalidArgument("frame: qubit must be 0 or 1");
}

}  // namespace

FrameEvent FrameEvent::rotation(double time, int qubit, double phase, double angle) {
  FrameEvent e;
  e.kind = Kind::kRotation;
  e.time = time;
  e.qubit = qubit;
  e.phase = phase;
  e.angle = angle;
  return e;
}

FrameEvent FrameEvent::virtual_z(double time, int qubit, double angle) {
  FrameEvent e;
  e.kind = Kind::kVirtualZ;
  e.time = time;
  e.qubit = qubit;
  e.angle = angle;
  return e;
}

FrameEvent FrameEvent::iswap(double time, double gamma, double chi) {
  FrameEvent e;
  e.kind = Kind::kIswap;
  e.time = time;
  e.gamma = gamma;
  e.chi = chi;
  return e;
}

double frame_detuning(const FrameState& s) { return kTwoPi * (s.omega1 - s.omega2); }

FrameState frame_update(const FrameState& s, const FrameEvent& event) {
  if (!std::isfinite(event.time) || event.time < s.t_now)
    throw InvalidArgument("frame_update: events must be time ordered");
  FrameState out = s;
  out.t_now = event.time;
  switch (event.kind) {
    case FrameEvent::Kind::kRotation:
      check_qubit(event.qubit);
      break;
    case FrameEvent::Kind::kVirtualZ:
      check_qubit(event.qubit);
      (event.qubit == 0 ? out.phi1 : out.phi2) = wrap((event.qubit == 0 ? s.phi1 : s.phi2) - event.angle);
      break;
    case FrameEvent::Kind::kIswap: {
      const double d = frame_detuning(s) * event.time;
      out.phi1 = wrap(d - event.chi - event.gamma + s.phi2);
      out.phi2 = wrap(-d + event.chi - event.gamma + s.phi1);
      break;
    }
  }
  return out;
}

FrameState frame_run(FrameState s, const std::vector<FrameEvent>& events) {
  for (const auto& e : events) s = frame_update(s, e);
  return s;
}

double corrected_phase(const FrameState& s, int qubit, double phi0) {
  check_qubit(qubit);
  return phi0 + (qubit == 0 ? s.phi1 : s.phi2);
}

Matrix4cd frame_phase_matrix(double a, double b) {
  Matrix4cd z = Matrix4cd::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = std::polar(1.0, b);
  z(2, 2) = std::polar(1.0, a);
  z(3, 3) = std::polar(1.0, a + b);
  return z;
}

}  // namespace fluxsim
