"""Regenerates data/markers/dict_4x4_1000.json from OpenCV's predefined
DICT_4X4_1000 so the presenter can draw markers without OpenCV."""

import json
import pathlib
import sys

import cv2


def main() -> int:
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/markers/dict_4x4_1000.json")
    dictionary = cv2.aruco.getPredefinedDictionary(cv2.aruco.DICT_4X4_1000)
    markers = []
    for marker_id in range(1000):
        # 6x6 cells: 4x4 payload plus a one-cell black border.
        img = cv2.aruco.generateImageMarker(dictionary, marker_id, 6)
        bits = "".join("1" if img[r, c] > 127 else "0" for r in range(1, 5) for c in range(1, 5))
        markers.append(bits)
    doc = {
        "dictionary": "DICT_4X4_1000",
        "marker_bits": 4,
        "border_bits": 1,
        "encoding": "row-major payload bits, 1 = white, border cells are black",
        "markers": markers,
    }
    out.write_text(json.dumps(doc, indent=1) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
