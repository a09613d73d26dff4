#pragma once

// Umbrella header for the whole toolkit.

#include "zoo/backend.hpp"
#include "zoo/base64.hpp"
#include "zoo/bench.hpp"
#include "zoo/discovery.hpp"
#include "zoo/dsl.hpp"
#include "zoo/errors.hpp"
#include "zoo/graph.hpp"
#include "zoo/ndarray.hpp"
#include "zoo/primitives.hpp"
#include "zoo/publish.hpp"
#include "zoo/remote_http.hpp"
#include "zoo/runtime.hpp"
#include "zoo/serve.hpp"
#include "zoo/service.hpp"
#include "zoo/sha256.hpp"
#include "zoo/store.hpp"
#include "zoo/typecheck.hpp"
#include "zoo/types.hpp"
#include "zoo/version.hpp"
