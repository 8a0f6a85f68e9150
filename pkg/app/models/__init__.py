# Q-system path models package
