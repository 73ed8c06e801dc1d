#pragma once

#include "risra/model.hpp"

namespace fixture {

/// Small scenario used across the engine-level tests.
inline risra::SystemConfig desk()
{
    risra::SystemConfig c;
    c.n_users = 10;
    c.n_preambles = 8;
    c.n_subchannels = 4;
    c.max_grouping_level = 6;
    c.n_elements = 64;
    return c;
}

/// K = S = C = 1, |h_d|^2 fixed, no surface: lambda* has a closed form.
inline risra::SystemConfig deterministic()
{
    risra::SystemConfig c = desk();
    c.n_users = 1;
    c.n_preambles = 1;
    c.n_subchannels = 1;
    c.direct_fading = risra::DirectFading::Constant;
    c.direct_constant_gain = 1e-9;
    c.ris_enabled = false;
    return c;
}

} // namespace fixture
