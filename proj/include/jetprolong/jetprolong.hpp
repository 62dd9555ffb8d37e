#pragma once

/// Umbrella header.

#include "jetprolong/actions.hpp"
#include "jetprolong/errors.hpp"
#include "jetprolong/expression.hpp"
#include "jetprolong/frame_bundle.hpp"
#include "jetprolong/infinitesimal.hpp"
#include "jetprolong/jet.hpp"
#include "jetprolong/jet_group.hpp"
#include "jetprolong/multiindex.hpp"
#include "jetprolong/polymap.hpp"
#include "jetprolong/rank.hpp"
#include "jetprolong/taylor.hpp"
#include "jetprolong/tower.hpp"
