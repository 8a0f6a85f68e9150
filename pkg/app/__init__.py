# A_r Q-System Path Models App
