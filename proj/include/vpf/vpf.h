/* Copyright 2026 The VPF Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface to the voxel-pillar fusion library. Every call returns a
 * vpf_status; on failure vpf_last_error() describes the error for the calling
 * thread until its next failing call. Handles are opaque and owned by the
 * caller, who releases them with the matching *_free function. */

#ifndef VPF_VPF_H_
#define VPF_VPF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(VPF_BUILDING_LIBRARY)
#define VPF_API __attribute__((visibility("default")))
#else
#define VPF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vpf_status {
  VPF_OK = 0,
  VPF_ERR_EMPTY_GRID = 1,
  VPF_ERR_SHAPE_MISMATCH = 2,
  VPF_ERR_SPEC_MISMATCH = 3,
  VPF_ERR_CONSISTENCY = 4,
  VPF_ERR_DEGENERATE_BOX = 5,
  VPF_ERR_OUT_OF_RANGE = 6,
  VPF_ERR_INVALID_ARGUMENT = 7,
  VPF_ERR_IO = 8,
  VPF_ERR_FORMAT = 9,
  VPF_ERR_CONFIG = 10,
  VPF_ERR_INTERNAL = 11
} vpf_status;

typedef struct vpf_config vpf_config;
typedef struct vpf_cloud vpf_cloud;
typedef struct vpf_model vpf_model;

/* Center (x, y, z), dims (length, width, height) in meters, heading in
 * radians about +z. */
typedef struct vpf_box {
  double center[3];
  double dims[3];
  double heading;
} vpf_box;

VPF_API const char* vpf_version(void);
VPF_API const char* vpf_status_name(vpf_status status);
VPF_API const char* vpf_last_error(void);
VPF_API void vpf_string_free(char* s);

/* Configuration. Unknown JSON keys are rejected. */
VPF_API vpf_status vpf_config_default(vpf_config** out);
VPF_API vpf_status vpf_config_load(const char* path, vpf_config** out);
VPF_API vpf_status vpf_config_from_json(const char* text, vpf_config** out);
VPF_API vpf_status vpf_config_set_variant(vpf_config* cfg, const char* variant);
VPF_API vpf_status vpf_config_set_weights(vpf_config* cfg, const char* manifest_path);
VPF_API vpf_status vpf_config_to_json(const vpf_config* cfg, char** out);
VPF_API void vpf_config_free(vpf_config* cfg);

/* Point clouds in the "VPF1" format. `xyzi` holds n (x, y, z, intensity). */
VPF_API vpf_status vpf_cloud_load(const char* path, vpf_cloud** out);
VPF_API vpf_status vpf_cloud_from_points(const float* xyzi, size_t n, vpf_cloud** out);
VPF_API vpf_status vpf_cloud_save(const vpf_cloud* cloud, const char* path);
VPF_API size_t vpf_cloud_size(const vpf_cloud* cloud);
VPF_API void vpf_cloud_free(vpf_cloud* cloud);

/* Writes the initial voxel and pillar tensors as a two-record dump. */
VPF_API vpf_status vpf_voxelize(const vpf_config* cfg, const vpf_cloud* cloud,
                                const char* out_path);

/* Weights come from the configured manifest, or from the configured seed. */
VPF_API vpf_status vpf_model_create(const vpf_config* cfg, vpf_model** out);
/* Writes the readout to `out_path`. When `intermediates_dir` is non-null each
 * encoder tensor is also written there as <name>.vpft. */
VPF_API vpf_status vpf_model_forward(const vpf_model* model, const vpf_cloud* cloud,
                                     const char* out_path, const char* intermediates_dir);
VPF_API vpf_status vpf_model_export_weights(const vpf_model* model, const char* path);
VPF_API void vpf_model_free(vpf_model* model);

VPF_API vpf_status vpf_iou3d(const vpf_box* a, const vpf_box* b, double* out);
VPF_API vpf_status vpf_diou_loss(const vpf_box* b, const vpf_box* gt, double* out);
VPF_API vpf_status vpf_rectify_score(double s_cls, double iou_pred, double alpha, double* out);
VPF_API vpf_status vpf_encode_iou_target(double iou, double* out);
VPF_API vpf_status vpf_focal_loss(double p, int positive, double alpha, double gamma,
                                  double* out);

/* One CSV row per box of the JSON array at `boxes_path`. */
VPF_API vpf_status vpf_density_csv(const char* cloud_path, const char* boxes_path,
                                   const char* out_path);
/* Recall per S_Z value. A positive `threshold` applies to every class;
 * otherwise the per-class thresholds of `cfg` are used. */
VPF_API vpf_status vpf_recall_csv(const vpf_config* cfg, const char* gt_path,
                                  const char* pred_path, double threshold, const char* out_path);

/* Max |clipped IoU - Monte-Carlo IoU| over `trials` random rotated pairs. */
VPF_API vpf_status vpf_iou_check(size_t trials, uint64_t seed, double* max_error);

typedef void (*vpf_selftest_callback)(int id, const char* name, int passed, const char* detail,
                                      double seconds, void* user);
/* Runs every oracle suite; `failures` receives the number that failed. */
VPF_API vpf_status vpf_selftest(uint64_t seed, vpf_selftest_callback callback, void* user,
                                int* failures);

#ifdef __cplusplus
}
#endif

#endif /* VPF_VPF_H_ */
