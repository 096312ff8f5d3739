#pragma once

#include "sfdr/signalcore.hpp"
#include "sfdr/channel.hpp"
#include "sfdr/modem.hpp"
#include "sfdr/fec.hpp"
#include "sfdr/protocol.hpp"
#include "sfdr/relay.hpp"
#include "sfdr/destination.hpp"
#include "sfdr/analysis.hpp"
#include "sfdr/optimize.hpp"
#include "sfdr/results.hpp"
#include "sfdr/config.hpp"
#include "sfdr/experiments.hpp"
