#pragma once

// Core headers. The I/O layer (ldd/bridge/ws_server.hpp, midi_in.hpp,
// osc_sender.hpp, live.hpp, cli.hpp) needs Boost and is included separately.

#include "ldd/curves.hpp"
#include "ldd/optimizer.hpp"
#include "ldd/performance.hpp"
#include "ldd/rng.hpp"
#include "ldd/sonics.hpp"

#include "ldd/bridge/action_log.hpp"
#include "ldd/bridge/conductor.hpp"
#include "ldd/bridge/config.hpp"
#include "ldd/bridge/osc.hpp"
#include "ldd/bridge/replay.hpp"
#include "ldd/bridge/script.hpp"
#include "ldd/bridge/snapshot.hpp"
