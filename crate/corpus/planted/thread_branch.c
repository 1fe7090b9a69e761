/* planted: only the slow branch inverts the order of meta_lock and data_lock */
void write_block(int slow)
{
	mutex_lock(&meta_lock);
	mutex_lock(&data_lock);
	mutex_unlock(&data_lock);
	mutex_unlock(&meta_lock);
}

void sync_block(int slow)
{
	if (slow) {
		mutex_lock(&data_lock);
		mutex_lock(&meta_lock);
		mutex_unlock(&meta_lock);
		mutex_unlock(&data_lock);
	}
}
