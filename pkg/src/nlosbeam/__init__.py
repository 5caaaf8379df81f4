"""Indoor NLoS mmWave links over passive specular reflectors, with LiDAR-guided beam steering."""
