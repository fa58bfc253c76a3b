#pragma once

// Umbrella header for the engine and verifier. The HTTP service lives in
// <cluster/service.hpp> and is not included here.

#include <cluster/errors.hpp>
#include <cluster/int_matrix.hpp>
#include <cluster/exchange_matrix.hpp>
#include <cluster/laurent.hpp>
#include <cluster/laurent_text.hpp>
#include <cluster/seed.hpp>
#include <cluster/digest.hpp>
#include <cluster/atlas.hpp>
#include <cluster/checks.hpp>
#include <cluster/json_io.hpp>
#include <cluster/session.hpp>
