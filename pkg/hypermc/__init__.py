# hypermc package marker.
